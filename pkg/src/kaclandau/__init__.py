"""Interacting particle simulator for a Coulomb-type collision model.

The package simulates n velocities in three dimensions under two
exchangeable, momentum- and energy-respecting dynamics: a jump process
in which particle pairs collide at a singular, velocity-dependent rate,
and its diffusive small-scale limit, a coupled stochastic differential
equation with a mollified Coulomb-type interaction. Diagnostics cover
conservation, entropy, equilibration, propagation of chaos, and the
weak-form marginal hierarchy with a near/far splitting of the
interaction.
"""

from .core import (
    InteractionConfig,
    Mollifier,
    SystemState,
    div_coefficient,
    interaction_matrix,
    pair_coefficient,
    pair_indices,
    pair_matrix,
    projection_matrix,
    quadratic_form,
)
from .kernels import (
    GRAZING_AMPLITUDE,
    UNIT_MASS_AMPLITUDE,
    KernelConfig,
    RadialKernel,
)
from .sphere import CollisionSphere, orthonormal_frame, radial_nodes
from .jump import (
    JumpProcess,
    JumpRunResult,
    apply_collision,
    pair_rate,
    pair_rates_from_norms,
    run_jump,
    sample_exchanged_momentum,
    step_jump,
)
from .diffusion import (
    DiffusionConfig,
    DiffusionRunResult,
    drift,
    noise_increments,
    run_diffusion,
    step_euler_maruyama,
)
from .initial import (
    anisotropic_gaussian,
    bimaxwellian,
    from_array,
    gaussian,
    make_sampler,
)
from .testfunctions import (
    GaussianBump,
    Polynomial,
    SmoothBump,
    TestFunction,
    energy,
    fourth_moment,
)
from .generators import (
    GrazingReport,
    diffusion_generator_apply,
    grazing_limit_study,
    jump_generator_apply,
)
from .diagnostics import (
    ChaosEstimate,
    DiagnosticsRecord,
    HierarchyTerms,
    Moments,
    RemainderScan,
    TrendReport,
    WeakFormResidual,
    build_record,
    chaos_correlation,
    entropy_estimate,
    entropy_gap,
    hierarchy_terms,
    isotonic_trend,
    ks_threshold,
    marginal_histograms,
    maxwell_speed_cdf,
    maxwellian_distance,
    moments,
    remainder_scan,
    weak_form_residual,
)
from .ensemble import EnsembleRun, RunSpec, run_ensemble, run_seed, run_single
from .snapshots import (
    read_snapshot,
    snapshot_bytes,
    state_from_bytes,
    write_snapshot,
)
from .config import (
    ConfigError,
    RunConfig,
    default_config_text,
    load_config,
    parse_config,
)

__version__ = "0.1.0"

__all__ = [
    "SystemState", "InteractionConfig", "Mollifier", "projection_matrix",
    "pair_matrix", "interaction_matrix", "quadratic_form",
    "pair_coefficient", "div_coefficient", "pair_indices",
    "RadialKernel", "KernelConfig", "GRAZING_AMPLITUDE",
    "UNIT_MASS_AMPLITUDE",
    "CollisionSphere", "radial_nodes", "orthonormal_frame",
    "pair_rate", "pair_rates_from_norms", "sample_exchanged_momentum",
    "apply_collision", "step_jump", "JumpProcess", "JumpRunResult",
    "run_jump",
    "DiffusionConfig", "drift", "noise_increments", "step_euler_maruyama",
    "DiffusionRunResult", "run_diffusion",
    "gaussian", "anisotropic_gaussian", "bimaxwellian", "from_array",
    "make_sampler",
    "TestFunction", "Polynomial", "GaussianBump", "SmoothBump", "energy",
    "fourth_moment",
    "diffusion_generator_apply", "jump_generator_apply", "GrazingReport",
    "grazing_limit_study",
    "Moments", "moments", "entropy_estimate", "entropy_gap",
    "maxwell_speed_cdf", "maxwellian_distance", "ks_threshold",
    "marginal_histograms", "ChaosEstimate", "chaos_correlation",
    "HierarchyTerms", "hierarchy_terms", "WeakFormResidual",
    "weak_form_residual", "RemainderScan", "remainder_scan", "TrendReport",
    "isotonic_trend", "DiagnosticsRecord", "build_record",
    "RunSpec", "EnsembleRun", "run_seed", "run_single", "run_ensemble",
    "write_snapshot", "read_snapshot", "snapshot_bytes", "state_from_bytes",
    "ConfigError", "RunConfig", "parse_config", "load_config",
    "default_config_text",
    "__version__",
]
