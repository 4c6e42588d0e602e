"""Full counting statistics of Jaynes-Cummings quantum battery charging."""
from .battery import (ChargingCurvePoint, charging_curves, fidelity_to_excited, power,
                      power_at_tau_opt, snr, tau_opt)
from .dynamics import (JCParams, JointState, PropagatorBlocks, QubitDensity, evolve_joint,
                       product_state, propagator_blocks, reduced_qubit)
from .errors import ConfigError, ConsistencyError, NoChargingError, QbfcsError, TruncationError
from .fcs import (CountingVector, MomentTable, PhasePolynomial, cumulant_table, evaluate_gf,
                  fock_ground_closed_form, generating_function, moments, work_moments)
from .fockspace import (CavityDensity, Coherent, Fock, LadderOps, SqueezedCoherent, Thermal,
                        TruncationPolicy, build_cavity_state, ladder_ops, mean_photon,
                        required_cutoff)

__version__ = "0.1.0"
