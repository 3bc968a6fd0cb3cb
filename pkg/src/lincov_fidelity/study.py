"""Study runner: propagate an initial Gaussian state through the three-body
flow and tabulate every fidelity metric at each grid time.

Outputs one CSV row per grid time (fixed column schema, 17 significant
digits, empty cells for disabled or unavailable values) plus a JSON manifest
recording the configuration, seed, library version, and per-phase wall times.
"""

import configparser
import json
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .cr3bp import CR3BPParams, nrho_reference, propagate_states, propagate_variations
from .errors import FactorizationError
from .metrics import (
    FidelityReport,
    SolverOptions,
    esmd,
    esmdole_quadratic,
    esmdole_samples,
    max_directional_moment,
    mcr,
    sadl,
    smdm,
    wussadl,
    wussolc,
    wussos,
)
from .moments import (
    GaussianBelief,
    MomentSet,
    excess_kurtosis,
    sample_moments,
    standardized_moments,
)
from .monte_carlo import SampleCloud, sample_gaussian, save_cloud_csv
from .tensor_ops import SymTensor
from .transforms import (
    QuadraticMap,
    sigma_points,
    statistical_linearization,
    taylor2_moments,
    ut_moments,
)

__all__ = ["StudyConfig", "StudyResult", "default_config", "load_config", "save_config", "run_study"]

CSV_COLUMNS = [
    "t",
    "smdm_2", "smdm_ut", "smdm_mc",
    "esmd_2", "esmd_ut", "esmd_mc",
    "esmdole_2", "esmdole_mc",
    "mcr_2", "mcr_ut", "mcr_mc",
    "wussos", "wussolc", "sadl", "wussadl",
    "max_skew_2", "max_skew_mc", "max_kurt_2", "max_kurt_mc",
    "wussos_converged",
    "max_skew_2_converged", "max_skew_mc_converged",
    "max_kurt_2_converged", "max_kurt_mc_converged",
]


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to reproduce one study run."""

    mean: tuple
    cov: tuple  # row tuples
    mu_star: float
    t_end: float
    grid_points: int
    mc_enabled: bool = True
    mc_samples: int = 10_000
    mc_seed: int = 271828
    mc_rtol: float = 1e-10
    mc_atol: float = 1e-10
    ut_enabled: bool = True
    ut_alpha: float = 0.025
    ut_beta: float = 2.0
    ut_kappa: float = -3.0
    second_order_enabled: bool = True
    ref_rtol: float = 1e-12
    ref_atol: float = 1e-12
    eig_tol: float = 1e-10
    eig_max_iter: int = 1000
    eig_restarts: int = 10
    eig_seed: int = 271829
    eig_shift: str = "frobenius"

    def __post_init__(self):
        if self.grid_points < 2:
            raise ValueError("grid must have at least 2 points")
        if self.mc_samples < 2:
            raise ValueError("Monte Carlo needs at least 2 samples")
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "cov", tuple(tuple(float(v) for v in row) for row in self.cov))

    @property
    def mean_array(self) -> np.ndarray:
        return np.array(self.mean)

    @property
    def cov_array(self) -> np.ndarray:
        return np.array(self.cov)


@dataclass(frozen=True)
class StudyResult:
    csv_path: Path
    manifest_path: Path
    reports: list
    timings: dict
    dump_paths: list


def default_config() -> StudyConfig:
    """Reference NRHO study: non-isotropic position-weighted covariance,
    one orbit period, 10,000 samples."""
    ref = nrho_reference()
    cov = 1e-8 * np.diag([1.0, 0.0, 1.0, 0.0, 0.0, 0.0]) + 1e-10 * np.eye(6)
    return StudyConfig(
        mean=tuple(ref.x0),
        cov=tuple(map(tuple, cov)),
        mu_star=ref.params.mu_star,
        t_end=ref.period,
        grid_points=100,
        ut_kappa=3.0 - 6.0,
    )


def save_config(cfg: StudyConfig, path) -> None:
    """Write a config as a sectioned key-value file."""
    cp = configparser.ConfigParser()
    cp["dynamics"] = {"mu_star": repr(cfg.mu_star)}
    cp["state"] = {"mean": " ".join(repr(v) for v in cfg.mean)}
    cp["covariance"] = {
        f"row{i + 1}": " ".join(repr(v) for v in row) for i, row in enumerate(cfg.cov)
    }
    cp["grid"] = {"t_end": repr(cfg.t_end), "points": str(cfg.grid_points)}
    cp["monte_carlo"] = {
        "enabled": str(cfg.mc_enabled).lower(),
        "samples": str(cfg.mc_samples),
        "seed": str(cfg.mc_seed),
        "rtol": repr(cfg.mc_rtol),
        "atol": repr(cfg.mc_atol),
    }
    cp["unscented"] = {
        "enabled": str(cfg.ut_enabled).lower(),
        "alpha": repr(cfg.ut_alpha),
        "beta": repr(cfg.ut_beta),
        "kappa": repr(cfg.ut_kappa),
    }
    cp["second_order"] = {
        "enabled": str(cfg.second_order_enabled).lower(),
        "rtol": repr(cfg.ref_rtol),
        "atol": repr(cfg.ref_atol),
    }
    cp["eigensolver"] = {
        "tol": repr(cfg.eig_tol),
        "max_iter": str(cfg.eig_max_iter),
        "restarts": str(cfg.eig_restarts),
        "seed": str(cfg.eig_seed),
        "shift": cfg.eig_shift,
    }
    with open(path, "w", encoding="ascii") as f:
        cp.write(f)


def _get(cp, section, key, conv, default=None):
    try:
        raw = cp.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is not None:
            return default
        raise ValueError(f"config missing required field [{section}] {key}") from None
    try:
        return conv(raw)
    except ValueError as exc:
        raise ValueError(f"config field [{section}] {key}: {exc}") from None


def _parse_bool(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("true", "1", "yes", "on"):
        return True
    if val in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def load_config(path) -> StudyConfig:
    """Parse a sectioned key-value config file, with field-level diagnostics."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ValueError(f"config file not found: {path}")
    mean = _get(cp, "state", "mean", lambda s: tuple(float(v) for v in s.split()))
    if len(mean) != 6:
        raise ValueError(f"config field [state] mean: expected 6 values, got {len(mean)}")
    rows = []
    for i in range(6):
        row = _get(cp, "covariance", f"row{i + 1}", lambda s: tuple(float(v) for v in s.split()))
        if len(row) != 6:
            raise ValueError(f"config field [covariance] row{i + 1}: expected 6 values")
        rows.append(row)
    base = default_config()
    return StudyConfig(
        mean=mean,
        cov=tuple(rows),
        mu_star=_get(cp, "dynamics", "mu_star", float),
        t_end=_get(cp, "grid", "t_end", float),
        grid_points=_get(cp, "grid", "points", int),
        mc_enabled=_get(cp, "monte_carlo", "enabled", _parse_bool, base.mc_enabled),
        mc_samples=_get(cp, "monte_carlo", "samples", int, base.mc_samples),
        mc_seed=_get(cp, "monte_carlo", "seed", int, base.mc_seed),
        mc_rtol=_get(cp, "monte_carlo", "rtol", float, base.mc_rtol),
        mc_atol=_get(cp, "monte_carlo", "atol", float, base.mc_atol),
        ut_enabled=_get(cp, "unscented", "enabled", _parse_bool, base.ut_enabled),
        ut_alpha=_get(cp, "unscented", "alpha", float, base.ut_alpha),
        ut_beta=_get(cp, "unscented", "beta", float, base.ut_beta),
        ut_kappa=_get(cp, "unscented", "kappa", float, base.ut_kappa),
        second_order_enabled=_get(cp, "second_order", "enabled", _parse_bool,
                                  base.second_order_enabled),
        ref_rtol=_get(cp, "second_order", "rtol", float, base.ref_rtol),
        ref_atol=_get(cp, "second_order", "atol", float, base.ref_atol),
        eig_tol=_get(cp, "eigensolver", "tol", float, base.eig_tol),
        eig_max_iter=_get(cp, "eigensolver", "max_iter", int, base.eig_max_iter),
        eig_restarts=_get(cp, "eigensolver", "restarts", int, base.eig_restarts),
        eig_seed=_get(cp, "eigensolver", "seed", int, base.eig_seed),
        eig_shift=_get(cp, "eigensolver", "shift", str, base.eig_shift),
    )


def _directional_extreme_of(moment_set: MomentSet, solver: SolverOptions):
    """Max directional skewness and excess kurtosis of a moment set."""
    std = standardized_moments(moment_set)
    skew = max_directional_moment(std.skewness, solver)
    kurt = max_directional_moment(excess_kurtosis(std.kurtosis), solver)
    return skew, kurt


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return f"{float(value):.17g}"


def write_csv(reports, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for rep in reports:
            f.write(",".join(_fmt(getattr(rep, col)) for col in CSV_COLUMNS) + "\n")


def run_study(cfg: StudyConfig, out_dir, dump_times=()) -> StudyResult:
    """Execute the full study and write metrics.csv plus run_manifest.json.

    ``dump_times`` requests sample-cloud CSV dumps at the grid times nearest
    the given values (Monte Carlo variant must be enabled).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    params = CR3BPParams(mu_star=cfg.mu_star)
    belief = GaussianBelief(mean=cfg.mean_array, cov=cfg.cov_array)
    t_grid = np.linspace(0.0, cfg.t_end, cfg.grid_points)
    solver = SolverOptions(tol=cfg.eig_tol, max_iter=cfg.eig_max_iter,
                           restarts=cfg.eig_restarts, seed=cfg.eig_seed,
                           shift=cfg.eig_shift)

    tic = time.perf_counter()
    var_states = propagate_variations(belief.mean, t_grid, params,
                                      rtol=cfg.ref_rtol, atol=cfg.ref_atol)
    timings["reference_propagation_s"] = time.perf_counter() - tic

    clouds = None
    cloud0 = None
    if cfg.mc_enabled:
        tic = time.perf_counter()
        cloud0 = sample_gaussian(belief, cfg.mc_samples, cfg.mc_seed)
        clouds = propagate_states(cloud0.samples, t_grid, params,
                                  rtol=cfg.mc_rtol, atol=cfg.mc_atol)
        timings["monte_carlo_propagation_s"] = time.perf_counter() - tic

    sigma = None
    sigma_mapped = None
    if cfg.ut_enabled:
        tic = time.perf_counter()
        sigma = sigma_points(belief, alpha=cfg.ut_alpha, beta=cfg.ut_beta, kappa=cfg.ut_kappa)
        sigma_mapped = propagate_states(sigma.points, t_grid, params,
                                        rtol=cfg.ref_rtol, atol=cfg.ref_atol)
        timings["sigma_point_propagation_s"] = time.perf_counter() - tic

    tic = time.perf_counter()
    reports = []
    for idx, vs in enumerate(var_states):
        rep = FidelityReport(t=float(t_grid[idx]))
        mu_lin = vs.x
        p_lin = vs.stm @ belief.cov @ vs.stm.T
        p_lin = 0.5 * (p_lin + p_lin.T)
        qmap = QuadraticMap(value=mu_lin, jac=vs.stm, hess=vs.stt)

        if cfg.second_order_enabled:
            t2 = taylor2_moments(belief, qmap)
            rep.smdm_2 = smdm(t2.mean, mu_lin, p_lin)
            rep.esmd_2 = esmd(t2.mean, t2.cov, mu_lin, p_lin)
            rep.esmdole_2 = esmdole_quadratic(qmap, belief.cov, p_lin)
            rep.mcr_2 = mcr(p_lin, t2.cov).value
            so = wussos(qmap, belief.cov, p_lin, solver)
            rep.wussos = so.value
            rep.wussos_converged = so.converged
            rep.wussolc = wussolc(qmap, belief.cov, p_lin)
            skew, kurt = _directional_extreme_of(
                MomentSet(mean=t2.mean, cov=t2.cov, third=t2.third, fourth=t2.fourth),
                solver,
            )
            rep.max_skew_2 = skew.magnitude
            rep.max_skew_2_converged = skew.converged
            rep.max_kurt_2 = kurt.value
            rep.max_kurt_2_converged = kurt.converged

        if cfg.ut_enabled:
            ut = ut_moments(sigma, sigma_mapped[idx])
            rep.smdm_ut = smdm(ut.mean, mu_lin, p_lin)
            rep.esmd_ut = esmd(ut.mean, ut.cov, mu_lin, p_lin)
            try:
                rep.mcr_ut = mcr(p_lin, ut.cov).value
            except FactorizationError:
                rep.mcr_ut = None  # UT covariance lost positive definiteness
            sl = statistical_linearization(belief, ut)
            rep.sadl = sadl(vs.stm, sl.gain)
            rep.wussadl = wussadl(vs.stm, sl.gain, belief.cov, p_lin)

        if cfg.mc_enabled:
            zs = clouds[idx]
            ms = sample_moments(zs)
            rep.smdm_mc = smdm(ms.mean, mu_lin, p_lin)
            rep.esmd_mc = esmd(ms.mean, ms.cov, mu_lin, p_lin)
            rep.esmdole_mc = esmdole_samples(cloud0.samples, zs, qmap, belief.mean, p_lin)
            rep.mcr_mc = mcr(p_lin, ms.cov).value
            skew, kurt = _directional_extreme_of(ms, solver)
            rep.max_skew_mc = skew.magnitude
            rep.max_skew_mc_converged = skew.converged
            rep.max_kurt_mc = kurt.value
            rep.max_kurt_mc_converged = kurt.converged

        reports.append(rep)
    timings["metric_evaluation_s"] = time.perf_counter() - tic

    dump_paths = []
    for t_req in dump_times:
        if clouds is None:
            raise ValueError("--dump-samples requires the Monte Carlo variant")
        idx = int(np.argmin(np.abs(t_grid - t_req)))
        path = out_dir / f"samples_t{t_grid[idx]:.6f}.csv"
        save_cloud_csv(SampleCloud(samples=clouds[idx], seed=cfg.mc_seed), path)
        dump_paths.append(path)

    csv_path = out_dir / "metrics.csv"
    write_csv(reports, csv_path)
    manifest_path = out_dir / "run_manifest.json"
    manifest = {
        "config": asdict(cfg),
        "seed": cfg.mc_seed,
        "version": __version__,
        "grid_points": cfg.grid_points,
        "timings": timings,
        "outputs": [csv_path.name] + [p.name for p in dump_paths],
    }
    with open(manifest_path, "w", encoding="ascii") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return StudyResult(csv_path=csv_path, manifest_path=manifest_path,
                       reports=reports, timings=timings, dump_paths=dump_paths)


def apply_overrides(cfg: StudyConfig, seed: int | None = None,
                    disable_mc: bool = False, disable_ut: bool = False,
                    disable_second_order: bool = False) -> StudyConfig:
    """CLI-level toggles on top of a loaded config."""
    changes = {}
    if seed is not None:
        changes["mc_seed"] = seed
    if disable_mc:
        changes["mc_enabled"] = False
    if disable_ut:
        changes["ut_enabled"] = False
    if disable_second_order:
        changes["second_order_enabled"] = False
    return replace(cfg, **changes) if changes else cfg
