"""Experiment configuration, sweep orchestration, and CSV/JSON emission.

Configs are schema-validated pydantic models (extra keys rejected).  Every run
produces deterministic CSV rows (fixed column order, fixed float format) plus
a JSON manifest with the fully resolved configuration, library versions,
timings and per-point status.
"""

from __future__ import annotations

import concurrent.futures
import json
import platform
import time
from pathlib import Path
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from . import __version__, continuum, gaussian, hilbert, master, metrics, oracle, singlemode

SINGLE_SWEEP_COLUMNS = [
    "eta2_over_eta1", "Q", "kappa", "gamma_sq_re", "var_x", "var_p", "S_db",
    "S_db_ideal", "occ_bare", "occ_D", "flag_gsq_over_gammaq", "flag_trunc",
]
CONTINUUM_SWEEP_COLUMNS = [
    "nu", "Q", "u_nu", "v_nu", "gamma_sq_re", "gamma_sq_im", "occ_D", "occ_Dbar",
    "var_Xnu", "S_db", "S_db_fig3_convention", "flags",
]
ORACLE_COLUMNS = [
    "t", "var_x", "var_p", "nbar", "p_excited", "purity", "top2_population",
]


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    start: float
    stop: float
    num: int = Field(ge=1)
    log: bool = False

    def resolve(self) -> list[float]:
        if self.log:
            return list(np.logspace(np.log10(self.start), np.log10(self.stop), self.num))
        return list(np.linspace(self.start, self.stop, self.num))


GridLike = Union[list[float], GridSpec]


def _resolve_grid(g: GridLike) -> list[float]:
    return g.resolve() if isinstance(g, GridSpec) else [float(x) for x in g]


class SingleSweepParams(BaseModel):
    model_config = ConfigDict(extra="forbid")
    epsilon: float = 10.0
    omega0: float = 3.5
    gamma_q: float = 0.2
    g: float = 1.0
    eta1: float = 0.2
    eta2_over_eta1: GridLike = Field(default_factory=lambda: GridSpec(start=0.0, stop=0.99, num=25))
    Q: GridLike = Field(default_factory=lambda: [1e5, 1e6, 1e7, 1e8])
    fock_dim: int = 30
    include_corrections: bool = True
    include_loss: bool = True
    linewidth: Literal["coherence", "paper"] = "coherence"
    lamb: Literal["recentered", "full", "none"] = "recentered"


class ContinuumSweepParams(BaseModel):
    model_config = ConfigDict(extra="forbid")
    epsilon: float = 15.0
    omega_a: float = 3.0
    omega_b: float = 2.4
    alpha: float = 6e-4
    delta_omega: float = 0.01
    nu_max: float = 0.25
    n_nu: int = 41
    Q: GridLike = Field(default_factory=lambda: [1e3, 1e4, 1e5, 1e6])
    eta1: float = 0.2
    eta2: float = 0.2
    mode: Literal["with_corrections", "ideal"] = "with_corrections"
    scheme: Literal["averaged", "strobe"] = "averaged"
    strobe_dt: float | None = None
    omega_ref: float | None = None
    fock_dim: int = 12


class OracleParams(BaseModel):
    model_config = ConfigDict(extra="forbid")
    epsilon: float = 10.0
    omega0: float = 3.5
    gamma_q: float = 0.2
    g: float = 0.1
    eta1: float = 0.2
    eta2: float = 0.12
    kappa: float = Field(default=0.0, ge=0.0)
    fock_dim: int = 15
    horizon: float | None = None
    n_samples: int = 600
    retune: bool = True
    tol: float = 1e-9
    linewidth: Literal["coherence", "paper"] = "coherence"
    lamb: Literal["recentered", "full", "none"] = "recentered"
    sideband_check: bool = True


class ValidateParams(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n_random: int = 100


_PARAM_MODELS = {
    "single_sweep": SingleSweepParams,
    "continuum_sweep": ContinuumSweepParams,
    "oracle": OracleParams,
    "validate": ValidateParams,
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["single_sweep", "continuum_sweep", "oracle", "validate"]
    backend: Literal["gaussian", "fock", "both"] = "gaussian"
    seed: int = 0
    jobs: int = 1
    params: dict = Field(default_factory=dict)
    _params: object = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _validate_params(self):
        model = _PARAM_MODELS[self.kind]
        self._params = model.model_validate(self.params)
        return self

    @property
    def resolved_params(self):
        return self._params

    def resolved_dict(self) -> dict:
        d = self.model_dump()
        d["params"] = self._params.model_dump()
        return d


class ExperimentResult(BaseModel):
    kind: str
    columns: list[str]
    rows: list[dict]
    manifest: dict


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".12g")  # +0.0 normalizes negative zero
    return str(v)


def _native(v):
    """Coerce numpy scalars to plain python types for JSON transport."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {k: _native(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_native(x) for x in v]
    return v


def rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(_fmt(r[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _manifest(config: ExperimentConfig, points: list[dict], t0: float,
              extra: dict | None = None) -> dict:
    import scipy

    man = {
        "config": config.resolved_dict(),
        "versions": {
            "squeezecool": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": time.time() - t0,
        "points": points,
    }
    if extra:
        man.update(extra)
    return _native(man)


# -- single-mode sweep ---------------------------------------------------------


def _single_point(args) -> dict:
    ratio, Q, pdict, backend = args
    pm = SingleSweepParams.model_validate(pdict)
    options = singlemode.SingleModeOptions(
        include_corrections=pm.include_corrections,
        include_loss=pm.include_loss,
        linewidth=pm.linewidth,
        lamb=pm.lamb,
    )
    p = singlemode.SingleModeParams(
        epsilon=pm.epsilon, omega0=pm.omega0, gamma_q=pm.gamma_q, g=pm.g,
        eta1=pm.eta1, eta2=ratio * pm.eta1, Q=Q, fock_dim=pm.fock_dim,
    )
    dec = singlemode.sideband_decomposition(p)
    rates = singlemode.effective_rates(p, dec, linewidth=pm.linewidth)
    primary = "gaussian" if backend in ("gaussian", "both") else "fock"
    rep = singlemode.single_mode_report(p, options, backend=primary)
    row = {
        "eta2_over_eta1": ratio,
        "Q": Q,
        "kappa": rates.kappa,
        "gamma_sq_re": rates.gamma_sq,
        "var_x": rep.var_x,
        "var_p": rep.var_p,
        "S_db": rep.S_db,
        "S_db_ideal": singlemode.ideal_squeezing_db(p),
        "occ_bare": rep.occ_bare[0],
        "occ_D": rep.occ_D,
        "flag_gsq_over_gammaq": rates.gamma_sq / p.gamma_q > singlemode.FLAG_GSQ_OVER_GAMMAQ,
        "flag_trunc": any(n == "truncation" and r > t for n, r, t in rep.validity_flags),
    }
    status = {"eta2_over_eta1": ratio, "Q": Q, "status": "ok"}
    if backend == "both":
        repf = singlemode.single_mode_report(p, options, backend="fock")
        dev = max(
            abs(repf.var_x - rep.var_x) / max(rep.var_x, 1.0),
            abs(repf.var_p - rep.var_p) / max(rep.var_p, 1.0),
        )
        status["fock_gaussian_rel_dev"] = dev
        row["flag_trunc"] = any(
            n == "truncation" and r > t for n, r, t in repf.validity_flags
        )
    return {"row": _native(row), "status": _native(status)}


def run_single_sweep(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    pm: SingleSweepParams = config.resolved_params
    ratios = _resolve_grid(pm.eta2_over_eta1)
    qs = _resolve_grid(pm.Q)
    tasks = [(r, q, pm.model_dump(), config.backend) for q in qs for r in ratios
             if r * pm.eta1 < pm.eta1]
    outs = _run_pool(_single_point, tasks, config.jobs)
    rows = [o["row"] for o in outs]
    points = [o["status"] for o in outs]
    return ExperimentResult(
        kind="single_sweep", columns=SINGLE_SWEEP_COLUMNS, rows=rows,
        manifest=_manifest(config, points, t0),
    )


# -- continuum sweep -----------------------------------------------------------


def _continuum_qslice(args) -> list[dict]:
    Q, pdict, backend = args
    pm = ContinuumSweepParams.model_validate(pdict)
    p = continuum.ContinuumParams(
        epsilon=pm.epsilon, omega_a=pm.omega_a, omega_b=pm.omega_b, alpha=pm.alpha,
        delta_omega=pm.delta_omega, nu_max=pm.nu_max, n_nu=pm.n_nu, Q=Q,
        eta1=pm.eta1, eta2=pm.eta2, strobe_dt=pm.strobe_dt,
        omega_ref=pm.omega_ref, fock_dim=pm.fock_dim,
    )
    out = []
    for pt in continuum.band_sweep(p, mode=pm.mode, scheme=pm.scheme):
        if pt.status != "ok":
            out.append({"row": None,
                        "status": {"nu": pt.nu, "Q": Q, "status": pt.status}})
            continue
        rep = pt.report
        var_xnu = pt.var_Xnu
        flags = ";".join(f"{n}={_fmt(r)}" for n, r, _ in rep.validity_flags)
        row = {
            "nu": pt.nu,
            "Q": Q,
            "u_nu": pt.pair.u,
            "v_nu": pt.pair.v,
            "gamma_sq_re": pt.gamma_sq.real,
            "gamma_sq_im": pt.gamma_sq.imag,
            "occ_D": rep.occ_D,
            "occ_Dbar": rep.occ_Dbar,
            "var_Xnu": var_xnu,
            "S_db": rep.S_db,
            "S_db_fig3_convention": metrics.squeezing_db_unnormalized(var_xnu),
            "flags": flags,
        }
        out.append({"row": _native(row), "status": {"nu": float(pt.nu), "Q": float(Q), "status": "ok"}})
    return out


def run_continuum_sweep(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    pm: ContinuumSweepParams = config.resolved_params
    qs = _resolve_grid(pm.Q)
    tasks = [(q, pm.model_dump(), config.backend) for q in qs]
    outs = _run_pool(_continuum_qslice, tasks, config.jobs)
    rows, points = [], []
    for qslice in outs:
        for o in qslice:
            if o["row"] is not None:
                rows.append(o["row"])
            points.append(o["status"])
    return ExperimentResult(
        kind="continuum_sweep", columns=CONTINUUM_SWEEP_COLUMNS, rows=rows,
        manifest=_manifest(config, points, t0),
    )


# -- oracle --------------------------------------------------------------------


def run_oracle(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    pm: OracleParams = config.resolved_params
    q_factor = float("inf") if pm.kappa == 0 else pm.omega0 / pm.kappa
    base = singlemode.SingleModeParams(
        epsilon=pm.epsilon, omega0=pm.omega0, gamma_q=pm.gamma_q, g=pm.g,
        eta1=pm.eta1, eta2=pm.eta2, Q=q_factor, fock_dim=pm.fock_dim,
    )
    options = singlemode.SingleModeOptions(linewidth=pm.linewidth, lamb=pm.lamb)
    p = oracle.FullModelParams(
        base=base, horizon=pm.horizon, n_samples=pm.n_samples,
        fock_dim=pm.fock_dim, retune=pm.retune, tol=pm.tol, options=options,
    )
    traj = oracle.simulate_full(p)
    rep = oracle.compare_effective(traj, p)
    var_x, var_p = traj.var_x(), traj.var_p()
    rows = [
        {
            "t": float(traj.times[k]),
            "var_x": float(var_x[k]),
            "var_p": float(var_p[k]),
            "nbar": float(traj.nbar[k]),
            "p_excited": float(traj.p_excited[k]),
            "purity": float(traj.purity[k]),
            "top2_population": float(traj.top2[k]),
        }
        for k in range(len(traj.times))
    ]
    extra = _native({
        "discrepancy": dict(vars(rep)),
        "integration": {
            "n_steps": traj.n_steps,
            "trace_defect": traj.trace_defect,
            "herm_defect": traj.herm_defect,
            "min_eigenvalue": traj.min_eig,
            "drives": [list(d) for d in p.resolved_drives()],
            "horizon": p.resolved_horizon(),
            "frame_frequency": p.frame_frequency(),
        },
    })
    if pm.sideband_check:
        sb = oracle.effective_coupling_check([(pm.epsilon - pm.omega0, pm.eta1),
                                              (pm.epsilon + pm.omega0, pm.eta2)],
                                             g=pm.g)
        extra["sideband_check"] = {
            "max_relative_error": sb.max_relative_error,
            "eta_sq_coefficient": sb.eta_sq_coefficient,
        }
    return ExperimentResult(
        kind="oracle", columns=ORACLE_COLUMNS, rows=rows,
        manifest=_manifest(config, [{"status": "ok"}], t0, extra),
    )


# -- validation suite ----------------------------------------------------------


def _check_complex_rate_identity(rng: np.ndarray, n: int) -> dict:
    worst = 0.0
    space = hilbert.FockSpace((6,))
    for _ in range(n):
        O = hilbert.Op(space, rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        g = complex(abs(rng.standard_normal()), rng.standard_normal())
        rho = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        rho = rho @ rho.conj().T
        rho /= np.trace(rho)
        term = master.LindbladTerm(O, g)
        dev = np.max(np.abs(master.apply_term(term, rho) - master.apply_term_literal(term, rho)))
        worst = max(worst, float(dev))
    return {"name": "complex_rate_identity", "metric": worst, "threshold": 1e-12,
            "passed": worst < 1e-12}


def _check_backend_equivalence(rng, n: int) -> dict:
    worst = 0.0
    for _ in range(n):
        ratio = rng.uniform(0.1, 0.55)
        p = singlemode.SingleModeParams(eta2=0.2 * ratio, Q=10 ** rng.uniform(4, 8),
                                        fock_dim=40)
        gs = singlemode.steady_state_gaussian(p)
        dm = singlemode.steady_state_fock(p)
        fs = metrics.gaussian_from_fock(dm.rho, dm.space)
        dev = np.max(np.abs(gs.cov - fs.cov)) / max(1.0, np.max(np.abs(gs.cov)))
        worst = max(worst, float(dev))
    return {"name": "backend_equivalence", "metric": worst, "threshold": 1e-6,
            "passed": worst < 1e-6}


def _check_dark_states(rng) -> dict:
    p = continuum.ContinuumParams()
    worst = 0.0
    for nu in (-0.2, 0.0, 0.15):
        st = gaussian.lyapunov_steady(continuum.averaged_drift(nu, p, "ideal"))
        pm = continuum.pair_parameters(nu, p, "D")
        occ = metrics.occupation_D(st, pm.pair, (0, 1)) + metrics.occupation_D(
            st, pm.pair, (1, 0))
        worst = max(worst, abs(occ))
    return {"name": "continuum_dark_state", "metric": worst, "threshold": 1e-8,
            "passed": worst < 1e-8}


def _check_evolution_invariants(rng) -> dict:
    space = hilbert.FockSpace((8,))
    a = hilbert.destroy(space, 0)
    pair = hilbert.BogoliubovPair(1.25, 0.75)
    D = hilbert.bogoliubov_op(space, pair, 0)
    spec = master.LiouvillianSpec(space, terms=[master.LindbladTerm(D, 0.5 + 0.1j),
                                                master.LindbladTerm(a, 0.05)])
    rho0 = np.zeros((8, 8), dtype=complex)
    rho0[1, 1] = 1.0
    defects = []

    def monitor(t, rho):
        defects.append(max(abs(np.trace(rho).real - 1.0),
                           float(np.max(np.abs(rho - rho.conj().T)))))

    rho = master._rk45(
        lambda t, r: master.apply_generator(r, spec.hamiltonian, spec.terms),
        rho0, 0.0, 30.0, 1e-9, 1e-9, monitor=monitor)
    final = master.DensityMatrix(space, 0.5 * (rho + rho.conj().T) / np.trace(rho).real)
    worst = float(max(defects))
    return {"name": "evolution_invariants", "metric": worst, "threshold": 1e-8,
            "passed": worst < 1e-8 and final is not None}


def _check_uncertainty(rng) -> dict:
    worst = np.inf
    for ratio in (0.0, 0.3, 0.6, 0.9):
        p = singlemode.SingleModeParams(eta2=0.2 * ratio, Q=1e6)
        st = singlemode.steady_state_gaussian(p)
        worst = min(worst, st.var_x(0) * st.var_p(0))
    return {"name": "uncertainty_product", "metric": float(worst), "threshold": 1.0 - 1e-8,
            "passed": worst >= 1.0 - 1e-8}


def run_validate(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    pm: ValidateParams = config.resolved_params
    rng = np.random.default_rng(config.seed)
    checks = [
        _check_complex_rate_identity(rng, pm.n_random),
        _check_backend_equivalence(rng, 3),
        _check_dark_states(rng),
        _check_evolution_invariants(rng),
        _check_uncertainty(rng),
    ]
    rows = [{"name": c["name"], "passed": c["passed"], "metric": c["metric"],
             "threshold": c["threshold"]} for c in checks]
    ok = all(c["passed"] for c in checks)
    return ExperimentResult(
        kind="validate", columns=["name", "passed", "metric", "threshold"], rows=rows,
        manifest=_manifest(config, [{"status": "ok" if ok else "failed"}], t0,
                           {"all_passed": ok}),
    )


# -- dispatch ------------------------------------------------------------------


def _run_pool(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


_RUNNERS = {
    "single_sweep": run_single_sweep,
    "continuum_sweep": run_continuum_sweep,
    "oracle": run_oracle,
    "validate": run_validate,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return _RUNNERS[config.kind](config)


def write_result(result: ExperimentResult, outdir: str | Path) -> list[Path]:
    """Persist CSV + manifest into a directory; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if result.kind == "validate":
        path = outdir / "validate.json"
        path.write_text(json.dumps(
            {"checks": result.rows, "all_passed": result.manifest.get("all_passed")},
            indent=2, sort_keys=True) + "\n")
        written.append(path)
    else:
        name = "oracle_trajectory" if result.kind == "oracle" else result.kind
        path = outdir / f"{name}.csv"
        path.write_text(rows_to_csv(result.columns, result.rows))
        written.append(path)
    if result.kind == "oracle":
        path = outdir / "oracle_report.json"
        path.write_text(json.dumps(
            {k: result.manifest[k] for k in ("discrepancy", "integration",
                                             "sideband_check") if k in result.manifest},
            indent=2, sort_keys=True, default=float) + "\n")
        written.append(path)
    man = outdir / "run_manifest.json"
    man.write_text(json.dumps(result.manifest, indent=2, sort_keys=True, default=float) + "\n")
    written.append(man)
    return written
