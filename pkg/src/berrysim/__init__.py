"""Berry phases in strongly driven, weakly anharmonic multi-level qubits.

Subpackages/modules:

* model      -- drive-frame Hamiltonians, effective field, level structure
* adiabatic  -- geometric phases: spectral, line-integral, perturbative
* sequence   -- interferometric pulse programs and sampled controls
* propagate  -- Schroedinger/Lindblad integration and trajectory records
* estimate   -- tomography, phase extraction, ML reconstruction, fidelity
* experiments -- sweep campaigns and CSV emission
* service    -- FastAPI wrapper around the campaigns
* cli        -- command-line client
"""

__version__ = "0.1.0"
