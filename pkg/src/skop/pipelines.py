"""Experiment pipelines: certification, convergence, modular comparison, dumps.

Each pipeline is a pure function of its configuration: per-scale jobs may
run on a thread pool but results are assembled in ladder order and every
reduction is deterministic, so reports are byte-identical for any thread
count.  Output files are written to a temp file and atomically renamed.

CSV schema (fixed order) shared by the convergence and modular pipelines:
    w, error, bound, holds, slack, omega_small, omega_large, tail_term, third_term
where the omega columns hold the two measured moduli entering the bound,
tail_term the out-of-window term (zero when absent) and third_term the
constant-reproduction rate term.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    LpBoundInputs,
    ModularBoundInputs,
    compare,
    lp_bound_terms,
    modular_bound_terms,
    proof_constants,
)
from .config import ExperimentConfig
from .errors import NumericError
from .kernels import (
    KernelProfile,
    check_partition_of_unity,
    check_tail_condition,
    continuous_moment,
    discrete_moment,
    l1_norm,
)
from .metrics import certify_lipschitz, fit_rate, lp_norm, omega_p
from .nonlinearity import (
    Nonlinearity,
    RateCertificate,
    check_psi_lipschitz,
    fit_rate_certificate,
    t_w_product,
)
from .operator import OperatorSpec, evaluate
from .phi import check_H, detect_modular_convergence, modular, orlicz_modulus, validate_phi
from .quadrature import GridFunction, nodes_weights
from .scheme import SamplingScheme

UNITY_EXACT_TOL = 1e-12

CSV_COLUMNS = (
    "w",
    "error",
    "bound",
    "holds",
    "slack",
    "omega_small",
    "omega_large",
    "tail_term",
    "third_term",
)


# -- output plumbing ----------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _csv_text(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _json_text(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_report(out_dir: str | Path, name: str, report: dict, rows: list[dict] | None) -> list[Path]:
    out = Path(out_dir)
    written = []
    if rows is not None:
        csv_path = out / f"{name}.csv"
        _atomic_write(csv_path, _csv_text(rows))
        written.append(csv_path)
    json_path = out / f"{name}.json"
    _atomic_write(json_path, _json_text(report))
    written.append(json_path)
    return written


# -- shared measurement helpers ------------------------------------------------


def _provenance(cfg: ExperimentConfig) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "package_version": __version__,
        "numpy_version": np.__version__,
    }


def _series_radius(cfg: ExperimentConfig, kernel: KernelProfile) -> float:
    if cfg.truncation_radius is not None:
        return cfg.truncation_radius
    return kernel.support_bound if kernel.compact else 1e4


def _auto_window(cfg: ExperimentConfig, kernel: KernelProfile, ws: list[float]) -> int:
    reach = max(abs(cfg.domain[0]), abs(cfg.domain[1]))
    radius = _series_radius(cfg, kernel)
    return int(math.ceil(max(ws) * reach + radius)) + 4


def _constant_defect(kernel: KernelProfile, scheme: SamplingScheme, radius: float) -> float:
    """sup over probes of |sum_k L(u - t_k) - 1| on the scheme's nodes."""
    if scheme.kind == "uniform":
        return check_partition_of_unity(kernel, radius=int(radius)).max_deviation
    probes = np.linspace(scheme.node(-2), scheme.node(2), 513)
    worst = 0.0
    nodes = scheme.nodes
    for u in probes:
        lo = np.searchsorted(nodes, u - radius, side="left")
        hi = np.searchsorted(nodes, u + radius, side="right")
        s = float(np.add.reduce(kernel(u - nodes[lo:hi])))
        worst = max(worst, abs(s - 1.0))
    return worst


def _nonlin_probe_grid(nonlin: Nonlinearity) -> np.ndarray:
    a = nonlin.params.get("a")
    if a is None:
        return np.linspace(0.1, 3.0, 65)
    inside = a + np.geomspace(1e-9, (1.0 - a) * (1.0 - 1e-9), 2049)
    return np.concatenate([inside, np.linspace(1.0, 3.0, 65)])


def _rate_certificate(
    nonlin: Nonlinearity, defect: float, ws: tuple[float, ...]
):
    """(theta0, M2) for the configured nonlinearity against the unity defect."""
    if nonlin.name == "identity":
        if defect <= UNITY_EXACT_TOL:
            return fit_rate_certificate([(w, 0.0) for w in ws])
        # without a partition of unity the linear defect does not decay in w
        samples = tuple((w, defect) for w in ws)
        return RateCertificate(exponent=0.0, coefficient=defect, samples=samples)
    grid = _nonlin_probe_grid(nonlin)
    return fit_rate_certificate([(w, t_w_product(nonlin, defect, w, grid)) for w in ws])


def _error_grid(cfg: ExperimentConfig, kernel: KernelProfile, signal, w: float):
    """Quadrature grid for ||S_w f - f||: split at signal kinks and, for
    compact spline kernels, at the reconstruction's knot lattice."""
    lo, hi = cfg.domain
    bps = list(signal.kinks)
    if kernel.compact:
        lattice = np.arange(math.ceil(2 * w * lo), math.floor(2 * w * hi) + 1) / (2.0 * w)
        if lattice.size <= 2048:
            bps.extend(lattice.tolist())
    return nodes_weights(lo, hi, cfg.norm_cells, bps)


def _run_jobs(jobs, threads: int):
    if threads <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [fut.result() for fut in futures]


# -- pipelines -----------------------------------------------------------------


def run_convergence(cfg: ExperimentConfig, threads: int = 1, verbose: bool = False) -> dict:
    """Measure ||S_w f - f||_p over the w ladder against the L^p estimate."""
    cfg.validate()
    kernel = cfg.build_kernel()
    nonlin = cfg.build_nonlinearity()
    signal = cfg.build_signal()
    ws = list(cfg.w_ladder)
    scheme = cfg.build_scheme(_auto_window(cfg, kernel, ws))
    spec = OperatorSpec(
        kernel=kernel,
        nonlin=nonlin,
        scheme=scheme,
        truncation_radius=cfg.truncation_radius,
        tail_budget=cfg.tail_budget,
    )
    p = cfg.p

    kernel_l1 = l1_norm(kernel)
    moment0 = discrete_moment(kernel, scheme, 0.0)
    moment_p = continuous_moment(kernel, p)
    defect = _constant_defect(kernel, scheme, spec.radius)
    cert = _rate_certificate(nonlin, defect, cfg.w_ladder)
    f_norm = lp_norm(signal, p, signal.support, cells=cfg.norm_cells).value

    def job_for(w: float):
        def job():
            nodes, weights = _error_grid(cfg, kernel, signal, w)
            rec = evaluate(spec, signal, w, nodes)
            diff = np.abs(rec.values - signal(nodes))
            error = float(np.dot(weights, diff**p)) ** (1.0 / p)
            om_small = omega_p(signal, 1.0 / w, p, shift_count=cfg.shift_count, cells=cfg.norm_cells)
            if scheme.delta_hi == 1.0:
                om_large = om_small
            else:
                om_large = omega_p(
                    signal, scheme.delta_hi / w, p, shift_count=cfg.shift_count, cells=cfg.norm_cells
                )
            inputs = LpBoundInputs(
                p=p,
                gap_lo=scheme.delta_lo,
                gap_hi=scheme.delta_hi,
                moment0=moment0,
                kernel_l1=kernel_l1,
                moment_p=moment_p,
                omega_small=om_small,
                omega_large=om_large,
                rate_coeff=cert.coefficient,
                rate_exponent=cert.exponent,
                f_norm=f_norm,
                w=w,
            )
            t1, t2, t3 = lp_bound_terms(inputs)
            verdict = compare(error, t1 + t2 + t3)
            if verbose:
                print(f"[convergence] w={w:g} error={error:.6g} bound={t1 + t2 + t3:.6g}")
            return {
                "w": w,
                "error": error,
                "bound": t1 + t2 + t3,
                "holds": verdict.holds,
                "slack": verdict.slack,
                "omega_small": om_small,
                "omega_large": om_large,
                "tail_term": 0.0,
                "third_term": t3,
            }

        return job

    rows = _run_jobs([job_for(w) for w in ws], threads)
    fit = fit_rate([(row["w"], row["error"]) for row in rows]) if all(
        row["error"] > 0 for row in rows
    ) else None

    constants = {
        "kernel_l1": kernel_l1,
        "moment0": moment0,
        "moment_p": moment_p,
        "gap_lo": scheme.delta_lo,
        "gap_hi": scheme.delta_hi,
        "unity_defect": defect,
        "rate_exponent": cert.exponent,
        "rate_coeff": cert.coefficient,
        "f_norm": f_norm,
        "p": p,
    }
    if signal.lip_alpha is not None:
        lip = certify_lipschitz(signal, signal.lip_alpha, p, np.geomspace(0.1, 8e-4, 9))
        constants["lip_alpha"] = lip.alpha
        constants["lip_c1"] = lip.c1
        constants["lip_passed"] = lip.passed
    return {
        "kind": "convergence",
        "provenance": _provenance(cfg),
        "constants": constants,
        "rows": rows,
        "fitted_slope": None if fit is None else fit.slope,
        "r_squared": None if fit is None else fit.r_squared,
        "violations": sum(0 if row["holds"] else 1 for row in rows),
    }


def run_modular(cfg: ExperimentConfig, threads: int = 1, verbose: bool = False) -> dict:
    """Measure the modular of mu (S_w f - f) against the modular estimate."""
    cfg.validate()
    kernel = cfg.build_kernel()
    nonlin = cfg.build_nonlinearity()
    signal = cfg.build_signal()
    phi = cfg.build_phi()
    validate_phi(phi)
    if not phi.is_convex:
        raise NumericError("the modular estimate requires a convex gauge")
    triple = cfg.build_triple(nonlin)
    if not check_H(triple, lambdas=(0.125, 0.25, 0.5, 0.75)):
        raise NumericError(
            f"compatibility check failed for triple '{triple.name}': "
            "phi(C_lam psi(u)) <= eta(lam u) does not hold on the sample grid"
        )

    ws = list(cfg.w_ladder)
    scheme = cfg.build_scheme(_auto_window(cfg, kernel, ws))
    spec = OperatorSpec(
        kernel=kernel,
        nonlin=nonlin,
        scheme=scheme,
        truncation_radius=cfg.truncation_radius,
        tail_budget=cfg.tail_budget,
    )

    moment0 = discrete_moment(kernel, scheme, 0.0)
    kernel_l1 = l1_norm(kernel)
    defect = _constant_defect(kernel, scheme, spec.radius)
    cert = _rate_certificate(nonlin, defect, cfg.w_ladder)
    recipe = proof_constants(triple, cfg.lambda0, moment0, cert.coefficient)

    if kernel.compact:
        tail_fit = None
    else:
        tail_fit = check_tail_condition(kernel, cfg.alpha, cfg.w_ladder)
        if tail_fit.exact_zero:
            tail_fit = None

    support = signal.support
    base = GridFunction.sample(
        signal, (support[0] - 1.0, support[1] + 1.0), cfg.norm_cells, signal.kinks
    )
    modular_eta = modular(triple.eta, base, cfg.lambda0)
    modular_phi = modular(phi, base, cfg.lambda0)

    def job_for(w: float):
        def job():
            nodes, weights = _error_grid(cfg, kernel, signal, w)
            rec = evaluate(spec, signal, w, nodes)
            diff = GridFunction(nodes=nodes, values=rec.values - signal(nodes), weights=weights)
            measured = modular(phi, diff, recipe.mu)
            om_small = omega_p_eta(triple, signal, 1.0 / w**cfg.alpha, recipe.lam, cfg)
            om_large = omega_p_eta(triple, signal, scheme.delta_hi / w, recipe.lam, cfg)
            inputs = ModularBoundInputs(
                kernel_l1=kernel_l1,
                gap_lo=scheme.delta_lo,
                gap_hi=scheme.delta_hi,
                moment0=moment0,
                omega_small=om_small,
                omega_large=om_large,
                modular_eta=modular_eta,
                modular_phi=modular_phi,
                rate_exponent=cert.exponent,
                w=w,
                split_alpha=cfg.alpha,
                tail_coeff=None if tail_fit is None else tail_fit.m1_fit,
                tail_exponent=None if tail_fit is None else tail_fit.alpha0_fit,
                mu=recipe.mu,
                lambda0=cfg.lambda0,
            )
            t1, t2, t3, t4 = modular_bound_terms(inputs)
            verdict = compare(measured, t1 + t2 + t3 + t4)
            if verbose:
                print(f"[modular] w={w:g} modular={measured:.6g} bound={t1 + t2 + t3 + t4:.6g}")
            return {
                "w": w,
                "error": measured,
                "bound": t1 + t2 + t3 + t4,
                "holds": verdict.holds,
                "slack": verdict.slack,
                "omega_small": om_small,
                "omega_large": om_large,
                "tail_term": t2,
                "third_term": t4,
                "_diff": diff,
            }

        return job

    rows = _run_jobs([job_for(w) for w in ws], threads)
    trend = detect_modular_convergence(phi, [(r["w"], r.pop("_diff")) for r in rows], recipe.mu)

    constants = {
        "kernel_l1": kernel_l1,
        "moment0": moment0,
        "gap_lo": scheme.delta_lo,
        "gap_hi": scheme.delta_hi,
        "unity_defect": defect,
        "rate_exponent": cert.exponent,
        "rate_coeff": cert.coefficient,
        "mu": recipe.mu,
        "lambda0": recipe.lambda0,
        "omega_lambda": recipe.lam,
        "c_lambda": recipe.c_lam,
        "modular_eta_f": modular_eta,
        "modular_phi_f": modular_phi,
        "split_alpha": cfg.alpha,
        "tail_coeff": None if tail_fit is None else tail_fit.m1_fit,
        "tail_exponent": None if tail_fit is None else tail_fit.alpha0_fit,
        "triple": triple.name,
        "constants_policy": "per proof recipe",
    }
    return {
        "kind": "modular",
        "provenance": _provenance(cfg),
        "constants": constants,
        "rows": rows,
        "converging": trend.converging,
        "modular_values": list(trend.values),
        "violations": sum(0 if row["holds"] else 1 for row in rows),
    }


def omega_p_eta(triple, signal, delta: float, lam: float, cfg: ExperimentConfig) -> float:
    return orlicz_modulus(
        triple.eta, signal, delta, lam, shift_count=cfg.shift_count, cells=cfg.norm_cells
    )


def run_certify(cfg: ExperimentConfig, threads: int = 1, verbose: bool = False) -> dict:
    """One-shot certification of a kernel/nonlinearity pair.

    Failures are reported fields, never aborts: a profile that misses the
    partition of unity simply reports its defect.
    """
    cfg.validate()
    kernel = cfg.build_kernel()
    nonlin = cfg.build_nonlinearity()
    radius = _series_radius(cfg, kernel)
    window = int(math.ceil(radius)) + 16
    scheme = cfg.build_scheme(window)

    betas = cfg.betas if cfg.betas is not None else ((0.5,) if not kernel.compact else (1.0, 2.0))
    nus = cfg.nus if cfg.nus is not None else ((0.5, 1.0) if not kernel.compact else (1.0, 2.0))

    unity = check_partition_of_unity(kernel, radius=int(radius)) if scheme.kind == "uniform" else None
    defect = unity.max_deviation if unity is not None else _constant_defect(kernel, scheme, radius)

    moment0 = discrete_moment(kernel, scheme, 0.0, radius=radius)
    m_beta = {}
    for beta in betas:
        try:
            m_beta[beta] = discrete_moment(kernel, scheme, beta, radius=radius)
        except NumericError as exc:
            m_beta[beta] = f"failed: {exc}"
    m_nu = {nu: continuous_moment(kernel, nu) for nu in nus}

    tail = check_tail_condition(kernel, cfg.alpha, cfg.w_ladder)

    rng = np.random.default_rng(cfg.seed)
    us = rng.uniform(0.0, 2.0, size=10**4)
    vs = rng.uniform(0.0, 2.0, size=10**4)
    lip_by_w = {}
    for w in cfg.w_ladder:
        rep = check_psi_lipschitz(nonlin, [w], us, vs)
        lip_by_w[w] = {"violations": rep.violations, "max_ratio": rep.max_ratio}
    clean = [w for w, rep in lip_by_w.items() if rep["violations"] == 0]

    cert = _rate_certificate(nonlin, defect, cfg.w_ladder)

    report = {
        "kind": "certify",
        "provenance": _provenance(cfg),
        "kernel": {
            "name": kernel.name,
            "l1_norm": l1_norm(kernel),
            "unity_defect": defect,
            "unity_radius": None if unity is None else unity.radius,
            "moment0": moment0,
            "m_beta": m_beta,
            "m_nu": m_nu,
            "tail_values": list(tail.values),
            "tail_exact_zero": tail.exact_zero,
            "tail_alpha0_fit": tail.alpha0_fit,
            "tail_m1_fit": tail.m1_fit,
        },
        "nonlinearity": {
            "name": nonlin.name,
            "zero_preserved": float(max(abs(nonlin.eval(w, 0.0)) for w in cfg.w_ladder)),
            "psi_lipschitz_by_w": lip_by_w,
            "psi_lipschitz_min_clean_w": min(clean) if clean else None,
            "rate_exponent": cert.exponent,
            "rate_coeff": cert.coefficient,
            "rate_samples": [[w, t] for w, t in cert.samples],
            "rate_exact_zero": cert.exact_zero,
        },
    }
    if verbose:
        print(f"[certify] {kernel.name}: defect={defect:.3g} m0={moment0:.6g}")
    return report


def run_reconstruct(cfg: ExperimentConfig, threads: int = 1, verbose: bool = False) -> dict:
    """Single-scale reconstruction dump for plotting."""
    cfg.validate()
    kernel = cfg.build_kernel()
    nonlin = cfg.build_nonlinearity()
    signal = cfg.build_signal()
    w = cfg.w_reconstruct if cfg.w_reconstruct is not None else cfg.w_ladder[-1]
    scheme = cfg.build_scheme(_auto_window(cfg, kernel, [w]))
    spec = OperatorSpec(
        kernel=kernel,
        nonlin=nonlin,
        scheme=scheme,
        truncation_radius=cfg.truncation_radius,
        tail_budget=cfg.tail_budget,
    )
    grid = np.linspace(cfg.domain[0], cfg.domain[1], cfg.grid_size)
    rec = evaluate(spec, signal, w, grid)
    return {
        "kind": "reconstruct",
        "provenance": _provenance(cfg),
        "w": w,
        "tail_bound_used": rec.tail_bound_used,
        "grid": rec.grid,
        "values": rec.values,
        "signal_values": signal(grid),
    }


def write_reconstruct_csv(out_dir: str | Path, report: dict) -> Path:
    lines = ["x,f,s_w"]
    for x, fx, sx in zip(report["grid"], report["signal_values"], report["values"]):
        lines.append(f"{x:.17g},{fx:.17g},{sx:.17g}")
    path = Path(out_dir) / "reconstruct.csv"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path
