"""Open-quantum-system workbench for cavity QED at desk scale.

Subpackages cover dense operator construction (qstate), model builders
(models), deterministic master-equation integration (lindblad),
stochastic state-diffusion ensembles (trajectories), closed-form Rabi
absorption spectra (spectra), cat-state collapse laws (decoherence),
the microtubule-cavity estimation pipeline (mtparams), a toy
internal-source hologram simulator (holography), and the command-line
front door (cli).
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    decoherence,
    holography,
    lindblad,
    models,
    mtparams,
    qstate,
    spectra,
    trajectories,
)
