"""Exact-arithmetic toolkit for multiplicative functions additive on sums
of k positive cubes: cube-sum enumeration and sieving, constraint-system
generation and bounded exact solving, polynomial identity verification,
three-cube decompositions, and theorem-level scenario runners."""

from .arith import (
    Factorization,
    GcdFactReport,
    PhasedRational,
    PhaseMismatch,
    UnknownValue,
    ValueStore,
    check_gcd_facts,
    eval_multiplicative,
    factorize,
)
from .cubes import (
    CubeSieve,
    NotFound,
    ResourceLimit,
    build_sieve,
    exceptional_stats,
    find_witness,
    has_representation,
    load_sieve,
    mod9_obstruction_scan,
    representations,
    save_sieve,
)
from .engine import (
    Equation,
    EquationSystem,
    SolutionReport,
    SolverConfig,
    VarId,
    cube_class_resolve,
    free_variables,
    generate_equations,
    seed_names,
    seed_system,
    solve,
    verify_assignment,
)
from .harness import (
    AdditivityReport,
    ScenarioReport,
    build_f2_counterexample,
    run_scenario,
    verify_additivity,
    write_report,
)
from .poly import ParseError, Polynomial, parse_poly, poly_combine, poly_pow, verify_identity
from .richmond import (
    Decomposition,
    NoCoprimeLambda,
    NonPositiveTerm,
    decompose,
    find_coprime_lambda,
    lambda_candidates,
)

__version__ = "0.1.0"
