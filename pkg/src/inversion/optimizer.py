"""
Iterative reconstruction of forcing terms.

`cg_reconstruct` is the conjugate-gradient scheme for a separable source
f(x) r(t,x): exact step for the quadratic model, Fletcher-Reeves directions,
stop once J_eps(f_{k+1}) < e_J. Data that carry a noise bound delta stop earlier,
at the noise floor (tau delta)^2 / 2, before the iteration starts fitting noise.
`gradient_descent` is the constant-step iteration W_{k+1} = W_k - alpha* J'(W_k)
for general (F, G).
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from ..errors import StagnationError
from ..numerics.forward import terminal_state
from ..numerics.models import BoundaryField, InitialData, SourcePair
from ..numerics.quadrature import inner_l2b, inner_l2t, l2_inner
from .functional import (
    apply_input_output,
    gradient_from_residual,
    lipschitz_constant,
    spatial_gradient_from_residual,
    spatial_penalty,
    terminal_spatial,
)
from .metrics import acc_error, conv_error
from .models import (
    AdmissibleBox,
    GroundTruth,
    IterationRecord,
    Measurement,
    OptimizerConfig,
    ReconstructionResult,
    RunStatus,
    SeparableSource,
    StepRule,
)

logger = logging.getLogger(__name__)

GRADIENT_FLOOR = 1e-14
DENOMINATOR_FLOOR = 1e-30


def project_admissible(w: SourcePair, box: Optional[AdmissibleBox]) -> SourcePair:
    """Componentwise clamp of (F, G) into the admissible box."""
    if box is None:
        return w
    return SourcePair(w.space, w.time, box.clip_F(w.F), box.clip_G(w.G))


def stop_value(cfg: OptimizerConfig, meas: Measurement) -> float:
    """e_J, raised to the noise floor (tau delta)^2 / 2 when the data carry a bound delta."""
    if cfg.discrepancy and meas.delta:
        return max(cfg.stop_tol, 0.5 * (cfg.discrepancy * meas.delta) ** 2)
    return cfg.stop_tol


def _errors(state: BoundaryField, f: np.ndarray, truth: Optional[GroundTruth]):
    if truth is None:
        return None, None
    return conv_error(state, truth.yT_clean), acc_error(f, truth.f_true, state.space)


def cg_reconstruct(
    s0: SeparableSource,
    init: Optional[InitialData],
    meas: Measurement,
    cfg: Optional[OptimizerConfig] = None,
    truth: Optional[GroundTruth] = None,
) -> ReconstructionResult:
    """Recover f in F = f r from final-time data with the CG iteration."""
    cfg = cfg or OptimizerConfig()
    if cfg.step_rule is not StepRule.CG:
        raise ValueError(f"cg_reconstruct needs step_rule='cg', got {cfg.step_rule.value!r}")
    space, time = s0.space, s0.time
    data = meas.on(space, time.T)
    eps = cfg.eps
    tol = stop_value(cfg, meas)

    def evaluate(s: SeparableSource):
        state = terminal_spatial(s, init)
        res = state - data
        J = 0.5 * inner_l2b(res, res) + 0.5 * eps * spatial_penalty(s.f, space)
        grad = spatial_gradient_from_residual(res, s, eps)
        return state, J, grad, l2_inner(grad, grad, space.dx)

    s = s0
    state, J, grad, g2 = evaluate(s)
    e, E = _errors(state, s.f, truth)
    records = [IterationRecord(0, J, math.sqrt(g2), e, E)]
    logger.info("cg k=0 J_eps=%.6e |J'|=%.6e stop below %.3e", J, math.sqrt(g2), tol)

    status: Optional[RunStatus] = RunStatus.CONVERGED if J < tol else None
    p = grad
    k = 0
    while status is None:
        if math.sqrt(g2) < GRADIENT_FLOOR:
            status = RunStatus.GRADIENT_VANISHED
            break
        psi_p = apply_input_output(p, s.r, space, time)
        denom = inner_l2b(psi_p, psi_p) + eps * l2_inner(p, p, space.dx)
        if not (math.isfinite(denom) and denom >= DENOMINATOR_FLOOR):
            raise StagnationError(f"relaxation denominator {denom:.3e} at k={k}")
        alpha = g2 / denom
        f_next = s.f - alpha * p
        if cfg.box is not None:
            f_next = cfg.box.clip_F(f_next)
        s = s.with_f(f_next)
        k += 1

        state, J, grad_next, g2_next = evaluate(s)
        e, E = _errors(state, s.f, truth)
        if J < tol:
            status = RunStatus.CONVERGED
        elif k >= cfg.max_iter:
            status = RunStatus.MAX_ITER

        gamma = None
        if status is None:
            gamma = g2_next / g2 if cfg.fletcher_reeves else 0.0
            p = grad_next + gamma * p
        grad, g2 = grad_next, g2_next
        records.append(IterationRecord(k, J, math.sqrt(g2), e, E, alpha, gamma))
        logger.info(
            "cg k=%d J_eps=%.6e alpha=%.6e gamma=%s |J'|=%.6e",
            k, J, alpha, "-" if gamma is None else f"{gamma:.6e}", math.sqrt(g2),
        )

    logger.info("cg stopped at k=%d: %s", k, status.value)
    return ReconstructionResult(np.array(s.f), status, records)


def gradient_descent(
    w0: SourcePair,
    init: Optional[InitialData],
    meas: Measurement,
    cfg: Optional[OptimizerConfig] = None,
) -> ReconstructionResult:
    """Constant-step gradient iteration W_{k+1} = P(W_k - alpha* J'(W_k))."""
    cfg = cfg or OptimizerConfig(step_rule=StepRule.FIXED, eps=0.0)
    if cfg.step_rule is not StepRule.FIXED:
        raise ValueError(f"gradient_descent needs step_rule='fixed', got {cfg.step_rule.value!r}")
    space, time = w0.space, w0.time
    limit = 1.0 / lipschitz_constant(time.T, space.l)
    alpha = limit if cfg.alpha is None else cfg.alpha
    if alpha > limit * (1.0 + 1e-12):
        raise ValueError(f"step {alpha:.6g} exceeds 1/L_T = {limit:.6g}")
    data = meas.on(space, time.T)
    eps = cfg.eps
    tol = stop_value(cfg, meas)

    def evaluate(w: SourcePair):
        res = terminal_state(space, time, w, init) - data
        J = 0.5 * inner_l2b(res, res)
        grad = gradient_from_residual(res, space, time)
        if eps:
            J += 0.5 * eps * inner_l2t(w, w)
            grad = SourcePair(space, time, grad.F + eps * w.F, grad.G + eps * w.G)
        return J, grad

    w = project_admissible(w0, cfg.box)
    J, grad = evaluate(w)
    grad_norm = math.sqrt(inner_l2t(grad, grad))
    records = [IterationRecord(0, J, grad_norm, alpha=alpha)]

    status: Optional[RunStatus] = None
    k = 0
    while status is None:
        if J < tol:
            status = RunStatus.CONVERGED
        elif grad_norm < GRADIENT_FLOOR:
            status = RunStatus.GRADIENT_VANISHED
        elif k >= cfg.max_iter:
            status = RunStatus.MAX_ITER
        if status is not None:
            break
        w_next = project_admissible(w - alpha * grad, cfg.box)
        step = w_next - w
        w = w_next
        k += 1
        J, grad = evaluate(w)
        grad_norm = math.sqrt(inner_l2t(grad, grad))
        records.append(
            IterationRecord(k, J, grad_norm, alpha=alpha, step_norm2=inner_l2t(step, step))
        )
        logger.info("gd k=%d J=%.6e |J'|=%.6e", k, J, grad_norm)

    logger.info("gd stopped at k=%d: %s", k, status.value)
    return ReconstructionResult(w, status, records)
