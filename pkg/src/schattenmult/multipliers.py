"""Hilbert-Schmidt frame multipliers ``M_{m,F,G} = T_F M_m U_G``.

Concretely ``M = U_F^H diag(m_hat) U_G = sum_i m_i F_i^* G_i`` where
``m_hat`` repeats each ``m_i`` ``N**2`` times.

Besides assembly this module holds the checks that tie multipliers to frame
duality: the correction operator ``Gamma`` in the inverse formula
``M^{-1} = M_{1/m, G~, F^d} + Gamma^* U_{F^d}``, the bijections between
multiplier-invertible systems and generalized duals, and the criterion for
``M^{-1} = M_{1/m, G~, F~}``.  Check functions return
:class:`MultiplierReport` objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, NotInvertibleError
from .hs_frames import (
    EQUALITY_TOL,
    HSFrameSystem,
    canonical_dual,
    dual_family,
    equivalence_operator,
    equivalence_operator_normalized,
    is_dual,
    is_generalized_dual,
    is_riesz_basis,
    kernel_basis,
    kernel_bessel,
    kernel_projection,
    recover_generalized_dual_spec,
    special_probe,
    systems_equal,
)
from .op_sequences import Symbol, basis_F, symbol_op_matrix
from .schatten_core import INVERTIBLE_RTOL, is_invertible, rank_one, schatten_norm

__all__ = [
    "BOUND_SLACK",
    "PROBE_CAP",
    "Check",
    "Flattening",
    "GammaOperator",
    "Multiplier",
    "MultiplierReport",
    "Residual",
    "assemble",
    "duals_determine_frame",
    "equivalence_criterion_check",
    "flatten_to_ordinary",
    "gamma",
    "gamma_adjoint_closed_form",
    "gamma_uniqueness_probe",
    "inverse_decomposition_check",
    "inverse_decomposition_residual",
    "lambda_inverse",
    "lambda_map",
    "lambda_reverse",
    "ordinary_multiplier",
    "perturbation_suite",
    "probe_duals",
    "riesz_invertibility_check",
    "schatten_class_bound_check",
    "theta",
    "theta_inverse",
    "upper_bound_check",
]

#: additive slack for norm inequalities ``lhs <= rhs``
BOUND_SLACK = 1e-9
#: maximum number of (i, k) probe duals in uniqueness and witness sweeps
PROBE_CAP = 64


# ----------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    lhs: float
    rhs: float
    passed: bool
    note: str = ""
    kind: str = "bound"  # "bound": lhs <= rhs + slack; "flag": boolean condition
    slack: float = 0.0

    def rejudge(self, slack: float) -> "Check":
        """Re-evaluate a bound with a different additive slack; flags are unchanged."""
        if self.kind != "bound":
            return self
        return Check(self.name, self.lhs, self.rhs, bool(self.lhs <= self.rhs + slack), self.note, self.kind, slack)

    def to_dict(self) -> dict:
        d = {"name": self.name, "lhs": _num(self.lhs), "rhs": _num(self.rhs), "pass": bool(self.passed)}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class Residual:
    name: str
    value: float

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value)}


def _num(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class MultiplierReport:
    instance: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    skipped: Optional[str] = None

    def bound(self, name, lhs, rhs, slack: float = BOUND_SLACK, note: str = "") -> Check:
        """Record ``lhs <= rhs + slack``."""
        c = Check(name, float(lhs), float(rhs), bool(lhs <= rhs + slack), note, "bound", slack)
        self.checks.append(c)
        return c

    def flag(self, name, ok: bool, note: str = "") -> Check:
        """Record a boolean condition as ``mismatch <= 0``."""
        c = Check(name, 0.0 if ok else 1.0, 0.0, bool(ok), note, "flag")
        self.checks.append(c)
        return c

    def residual(self, name, value) -> None:
        self.residuals.append(Residual(name, float(value)))

    def merge(self, other: "MultiplierReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.lhs, c.rhs, c.passed, c.note, c.kind, c.slack))
        for r in other.residuals:
            self.residuals.append(Residual(prefix + r.name, r.value))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        d = {
            "instance": self.instance,
            "checks": [c.to_dict() for c in self.checks],
            "residuals": [r.to_dict() for r in self.residuals],
        }
        if self.skipped:
            d["skipped"] = self.skipped
        return d


def _dims(F: HSFrameSystem) -> dict:
    return {"d": F.d, "N": F.N, "n": F.n}


def _op(A) -> float:
    return float(np.linalg.norm(A, 2))


# ----------------------------------------------------------------------------
# assembly


class Multiplier:
    """``M_{m,F,G}`` with its ``d x d`` matrix cached at construction."""

    def __init__(self, m: Symbol, F: HSFrameSystem, G: HSFrameSystem):
        F.compatible(G)
        if len(m) != F.n:
            raise DimensionError(f"symbol length {len(m)} != number of maps {F.n}")
        self.m, self.F, self.G = m, F, G
        mhat = m.expanded(F.N)
        M = F.synthesis_mat @ (mhat[:, None] * G.analysis_mat)
        M.setflags(write=False)
        self.matrix = M

    @property
    def d(self) -> int:
        return self.F.d

    def factorization_residual(self) -> float:
        """``||M - T_F D_m U_G||_op`` with the diagonal built explicitly."""
        D = symbol_op_matrix(self.m, self.F.N)
        return _op(self.matrix - self.F.synthesis_mat @ D @ self.G.analysis_mat)

    @property
    def op_norm(self) -> float:
        return _op(self.matrix)

    def schatten_norm(self, p: float) -> float:
        return schatten_norm(self.matrix, p)

    def is_invertible(self, rtol: float = INVERTIBLE_RTOL) -> bool:
        return is_invertible(self.matrix, rtol)

    def inverse(self) -> np.ndarray:
        if not self.is_invertible():
            raise NotInvertibleError("multiplier fails the invertibility gate")
        return np.linalg.inv(self.matrix)


def assemble(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> Multiplier:
    return Multiplier(m, F, G)


def upper_bound_check(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> MultiplierReport:
    """``||M||_op <= sqrt(B_F) sqrt(B_G) ||m||_inf`` with unsquared bounds."""
    M = assemble(m, F, G)
    rep = MultiplierReport(instance=_dims(F))
    rhs = math.sqrt(F.upper_sq) * math.sqrt(G.upper_sq) * m.sup_mod
    lhs = M.op_norm
    rep.bound("op_norm_upper_bound", lhs, rhs)
    rep.residual("slack_ratio", rhs / lhs if lhs > 0 else math.inf)
    rep.residual("factorization", M.factorization_residual())
    return rep


# ----------------------------------------------------------------------------
# flattening to ordinary Bessel multipliers


class Flattening(NamedTuple):
    mhat: Symbol
    Phi: np.ndarray  # shape (n N^2, d); Phi[j] = F_i^*(E_k), j = i N^2 + k
    Psi: np.ndarray


def flatten_to_ordinary(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> Flattening:
    """Vectors ``F_i^*(E_k)``, ``G_i^*(E_k)`` and the expanded symbol.

    The vectors are produced by applying the synthesis operator to the
    basis sequences one at a time.
    """
    F.compatible(G)
    NN = F.N * F.N
    Phi = np.empty((F.rows, F.d), dtype=np.complex128)
    Psi = np.empty((F.rows, F.d), dtype=np.complex128)
    for i in range(F.n):
        for k in range(NN):
            e = basis_F(i, k, F.n, F.N).flat()
            Phi[i * NN + k] = F.synthesis_mat @ e
            Psi[i * NN + k] = G.synthesis_mat @ e
    return Flattening(Symbol(m.expanded(F.N)), Phi, Psi)


def ordinary_multiplier(mhat: Symbol, Phi, Psi) -> np.ndarray:
    """``sum_j mhat_j phi_j (x) psi_j``, i.e. ``f -> sum_j mhat_j <f, psi_j> phi_j``."""
    Phi, Psi = np.asarray(Phi), np.asarray(Psi)
    M = np.zeros((Phi.shape[1], Psi.shape[1]), dtype=np.complex128)
    for c, phi, psi in zip(mhat.values, Phi, Psi):
        M += c * rank_one(phi, psi)
    return M


# ----------------------------------------------------------------------------
# Schatten-class bounds and perturbations


def schatten_class_bound_check(m: Symbol, F: HSFrameSystem, G: HSFrameSystem, p: float) -> MultiplierReport:
    """``||M||_{C_p(K)} <= sqrt(B_G B_F) N^2 ||m||_p``.

    The sharper ``sqrt(B_G B_F) N^(2/p) ||m||_p`` (from the measured symbol
    operator norm) is recorded as a second check.
    """
    M = assemble(m, F, G)
    rep = MultiplierReport(instance={**_dims(F), "p": p})
    lhs = M.schatten_norm(p)
    root = math.sqrt(G.upper_sq * F.upper_sq)
    rhs = root * F.N**2 * m.lp_norm(p)
    rep.bound("schatten_p_bound", lhs, rhs)
    rep.bound("schatten_p_bound_sharp", lhs, root * (F.N**2) ** (1.0 / p) * m.lp_norm(p))
    rep.residual("slack_ratio", rhs / lhs if lhs > 0 else math.inf)
    return rep


def _sup_op_distance(A: HSFrameSystem, B: HSFrameSystem) -> float:
    return max(_op(a - b) for a, b in zip(A.maps, B.maps))


def _l2_sense_distance(A: HSFrameSystem, B: HSFrameSystem) -> float:
    # Frobenius norm of the stacked difference; surrogate for the mixed norm
    return float(np.linalg.norm(A.analysis_mat - B.analysis_mat))


def perturbation_suite(
    m: Symbol,
    F: HSFrameSystem,
    G: HSFrameSystem,
    p: float,
    m_seq: Optional[Sequence[Symbol]] = None,
    F_seq: Optional[Sequence[HSFrameSystem]] = None,
    G_seq: Optional[Sequence[HSFrameSystem]] = None,
    final_tol: float = 1e-6,
    case: str = "",
) -> MultiplierReport:
    """Track ``||M_l - M||_{C_p(K)}`` along sequences converging to ``(m, F, G)``.

    Missing sequences are held constant.  Checks that the residuals are
    nonincreasing and that the last one is below ``final_tol``.  Distances
    recorded per step: ``l^p`` for the symbol, ``sup_i ||F_i^(l) - F_i||_op``
    and the Frobenius surrogate of the l2-sense distance for the systems.
    """
    lengths = {len(s) for s in (m_seq, F_seq, G_seq) if s is not None}
    if len(lengths) > 1:
        raise DimensionError(f"sequence lengths differ: {sorted(lengths)}")
    L = lengths.pop() if lengths else 1
    M = assemble(m, F, G).matrix
    rep = MultiplierReport(instance={**_dims(F), "p": p, "steps": L, "case": case})
    res = []
    for l in range(L):
        ml = m_seq[l] if m_seq is not None else m
        Fl = F_seq[l] if F_seq is not None else F
        Gl = G_seq[l] if G_seq is not None else G
        r = schatten_norm(assemble(ml, Fl, Gl).matrix - M, p)
        res.append(r)
        rep.residual(f"step{l}.multiplier_distance", r)
        rep.residual(f"step{l}.symbol_lp_distance", (ml - m).lp_norm(p))
        if F_seq is not None:
            rep.residual(f"step{l}.F_sup_op_distance", _sup_op_distance(Fl, F))
            rep.residual(f"step{l}.F_l2_frobenius_surrogate", _l2_sense_distance(Fl, F))
        if G_seq is not None:
            rep.residual(f"step{l}.G_sup_op_distance", _sup_op_distance(Gl, G))
            rep.residual(f"step{l}.G_l2_frobenius_surrogate", _l2_sense_distance(Gl, G))
    worst_increase = max([b - a for a, b in zip(res, res[1:])], default=0.0)
    rep.bound("residuals_nonincreasing", worst_increase, 0.0, slack=1e-12)
    rep.bound("final_residual", res[-1], final_tol, slack=0.0)
    return rep


# ----------------------------------------------------------------------------
# Riesz systems


def riesz_invertibility_check(m: Symbol, F: HSFrameSystem, G: HSFrameSystem, rtol: float = INVERTIBLE_RTOL) -> MultiplierReport:
    """Invertibility versus semi-normalization for Riesz systems.

    Requires ``F`` to be a Riesz basis with bijective synthesis.  If ``G``
    is one too, checks ``M invertible <=> m semi-normalized`` and the
    two-sided bound ``A_F A_G ||m||_inf <= ||M|| <= B_F B_G ||m||_inf``
    (unsquared Riesz bounds).  If ``m`` is semi-normalized, checks
    ``M invertible <=> G Riesz``.  Both gates are relative with ``rtol``.
    """
    rep = MultiplierReport(instance=_dims(F))
    rf = is_riesz_basis(F, rtol)
    if not rf.is_riesz:
        rep.skipped = "F is not a Riesz basis with bijective synthesis (needs n*N^2 = d)"
        return rep
    rg = is_riesz_basis(G, rtol)
    M = assemble(m, F, G)
    inv = M.is_invertible(rtol)
    semi = m.semi_normalized(rtol)
    rep.residual("sigma_min_over_max", _cond_ratio(M.matrix))
    rep.residual("symbol_min_over_max", m.inf_mod / m.sup_mod if m.sup_mod > 0 else 0.0)
    if rg.is_riesz:
        rep.flag("invertible_iff_semi_normalized", inv == semi, note=f"invertible={inv}, semi={semi}")
        nrm = M.op_norm
        rep.bound("norm_lower", rf.lower * rg.lower * m.sup_mod, nrm)
        rep.bound("norm_upper", nrm, rf.upper * rg.upper * m.sup_mod)
    if semi:
        rep.flag("invertible_iff_G_riesz", inv == rg.is_riesz, note=f"invertible={inv}, G_riesz={rg.is_riesz}")
    if not rep.checks:
        rep.skipped = "G is not Riesz and m is not semi-normalized"
    return rep


def _cond_ratio(A) -> float:
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


# ----------------------------------------------------------------------------
# Gamma and the inverse formula


class GammaOperator:
    """Matrix of ``Gamma : K -> direct sum``, shape ``(n N^2, d)``."""

    def __init__(self, mat, m: Symbol, G: HSFrameSystem):
        mat = np.asarray(mat, dtype=np.complex128)
        mat.setflags(write=False)
        self.mat = mat
        self.m = m
        self.G = G

    def kernel_identity_residual(self) -> float:
        """``||T_G D_{conj m} Gamma||_op``; zero in exact arithmetic."""
        D = symbol_op_matrix(self.m.conj(), self.G.N)
        return _op(self.G.synthesis_mat @ D @ self.mat)

    @property
    def norm(self) -> float:
        return _op(self.mat)


def _require_gamma_inputs(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> Multiplier:
    if not m.semi_normalized():
        raise DomainError("symbol is not semi-normalized")
    G.require_frame()
    M = assemble(m, F, G)
    if not M.is_invertible():
        raise NotInvertibleError("multiplier fails the invertibility gate")
    return M


def gamma(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> GammaOperator:
    """``Gamma = U_F (M^{-1})^* - D_{1/conj m} U_G S_G^{-1}`` (closed form)."""
    M = _require_gamma_inputs(m, F, G)
    Minv = np.linalg.inv(M.matrix)
    inv_mbar = 1.0 / m.conj().expanded(F.N)
    mat = F.analysis_mat @ Minv.conj().T - inv_mbar[:, None] * (G.analysis_mat @ G.frame_op_inv)
    return GammaOperator(mat, m, G)


def gamma_adjoint_closed_form(m: Symbol, F: HSFrameSystem, G: HSFrameSystem) -> np.ndarray:
    """``Gamma^* = M^{-1} T_F - S_G^{-1} T_G D_{1/m}``, derived independently."""
    M = _require_gamma_inputs(m, F, G)
    Minv = np.linalg.inv(M.matrix)
    Dinv = symbol_op_matrix(m.reciprocal(), F.N)
    return Minv @ F.synthesis_mat - G.frame_op_inv @ G.synthesis_mat @ Dinv


def inverse_decomposition_residual(
    m: Symbol, F: HSFrameSystem, G: HSFrameSystem, Fd: HSFrameSystem, Gamma=None, Minv=None
) -> float:
    """``||M^{-1} - (M_{1/m, G~, Fd} + Gamma^* U_{Fd})||_op``."""
    if Gamma is None:
        Gamma = gamma(m, F, G)
    gmat = Gamma.mat if isinstance(Gamma, GammaOperator) else np.asarray(Gamma)
    if Minv is None:
        Minv = np.linalg.inv(assemble(m, F, G).matrix)
    rhs = assemble(m.reciprocal(), canonical_dual(G), Fd).matrix + gmat.conj().T @ Fd.analysis_mat
    return _op(Minv - rhs)


def inverse_decomposition_check(m: Symbol, F: HSFrameSystem, G: HSFrameSystem, Fd: HSFrameSystem, dual_tol: float = 1e-8) -> float:
    """Residual of the inverse formula for one dual ``Fd`` of ``F``."""
    if not is_dual(Fd, F, dual_tol):
        raise DomainError("Fd is not a dual of F")
    return inverse_decomposition_residual(m, F, G, Fd)


def probe_duals(F: HSFrameSystem, cap: int = PROBE_CAP, anchor=None) -> list:
    """Canonical dual followed by the (i, k) probe duals.

    When ``n N^2`` exceeds ``cap`` the probe indices are spread evenly over
    the flat range.
    """
    NN = F.N * F.N
    total = F.n * NN
    if total <= cap:
        idx = range(total)
    else:
        idx = sorted(set(np.linspace(0, total - 1, cap).round().astype(int).tolist()))
    duals = [canonical_dual(F)]
    for j in idx:
        duals.append(dual_family(F, special_probe(F, j // NN, j % NN, anchor)))
    return duals


def gamma_uniqueness_probe(
    m: Symbol,
    F: HSFrameSystem,
    G: HSFrameSystem,
    rng,
    n_perturbations: int = 20,
    detect_tol: float = 1e-6,
    zero_tol: float = 1e-8,
    cap: int = PROBE_CAP,
) -> MultiplierReport:
    """Show that perturbing ``Gamma`` breaks the inverse formula on some probe dual.

    Perturbations are unit-norm.  When ``ker(T_G)`` is nontrivial they are
    drawn as ``D_{1/conj m} Psi`` with ``T_G Psi = 0`` so that the kernel
    identity still holds for the perturbed operator; otherwise they are
    generic.
    """
    rng = np.random.default_rng(rng)
    M = _require_gamma_inputs(m, F, G)
    Minv = np.linalg.inv(M.matrix)
    Gam = gamma(m, F, G)
    duals = probe_duals(F, cap)
    rep = MultiplierReport(instance={**_dims(F), "probes": len(duals), "perturbations": n_perturbations})

    base = max(inverse_decomposition_residual(m, F, G, Fd, Gam, Minv) for Fd in duals)
    rep.bound("unperturbed_residual", base, zero_tol, slack=0.0)

    inv_mbar = 1.0 / m.conj().expanded(F.N)
    worst = math.inf
    for t in range(n_perturbations):
        if G.rows > G.d:
            Delta = inv_mbar[:, None] * kernel_bessel(G, rng)
            kind = "kernel"
        else:
            Delta = rng.standard_normal((G.rows, G.d)) + 1j * rng.standard_normal((G.rows, G.d))
            kind = "generic"
        Delta /= _op(Delta)
        cand = Gam.mat + Delta
        exposure = max(inverse_decomposition_residual(m, F, G, Fd, cand, Minv) for Fd in duals)
        worst = min(worst, exposure)
        rep.residual(f"perturbation{t}.{kind}.exposure", exposure)
    if n_perturbations:
        rep.bound("min_exposure", detect_tol, worst, slack=0.0, note="every perturbation exposed")
    return rep


# ----------------------------------------------------------------------------
# Theta: Inv(G, m) <-> generalized duals


def theta(F: HSFrameSystem, m: Symbol, G: HSFrameSystem) -> HSFrameSystem:
    """``{G_i S_G^{-1} M + conj(m_i) pi_i Gamma}`` for ``F`` in ``Inv(G, m)``."""
    M = _require_gamma_inputs(m, F, G)
    Gam = gamma(m, F, G)
    mbar = m.conj().expanded(G.N)
    return G.with_analysis(G.analysis_mat @ (G.frame_op_inv @ M.matrix) + mbar[:, None] * Gam.mat)


def theta_inverse(Ggd: HSFrameSystem, m: Symbol, G: HSFrameSystem) -> HSFrameSystem:
    """Preimage of ``Ggd`` under :func:`theta`.

    With ``(Q, Psi)`` recovered from ``Ggd``, returns
    ``F_i = (1/conj m_i) (G_i S_G^{-1} + pi_i Psi) Q^*``.  The ``Q^*`` must
    multiply the kernel part too: for this ``F`` one gets ``M = Q`` and
    ``Gamma = D_{1/conj m} Psi Q^{-*}``, so ``theta(F) = Ggd``.
    """
    if not m.semi_normalized():
        raise DomainError("symbol is not semi-normalized")
    spec = recover_generalized_dual_spec(Ggd, G)
    if not is_invertible(spec.Q):
        raise NotInvertibleError("recovered Q = T_G U_gd is singular")
    inv_mbar = 1.0 / m.conj().expanded(G.N)
    U = inv_mbar[:, None] * ((G.analysis_mat @ G.frame_op_inv + spec.Psi) @ spec.Q.conj().T)
    return G.with_analysis(U)


# ----------------------------------------------------------------------------
# Lambda: GD(G) <-> GD(G')


def lambda_map(Ggd: HSFrameSystem, G: HSFrameSystem, Gp: HSFrameSystem, mode: str = "inverse") -> HSFrameSystem:
    """Send a generalized dual of ``G`` to one of ``Gp``.

    ``mode="inverse"``: ``{G'_i S_{G'}^{-1} T_G U_gd + pi_i P_ker(T_{G'}) U_gd}``.
    ``mode="literal"``: same with ``S_{G'}`` in place of ``S_{G'}^{-1}``.
    """
    Gp.require_frame()
    G.compatible(Gp)
    if mode == "inverse":
        S = Gp.frame_op_inv
    elif mode == "literal":
        S = Gp.frame_op
    else:
        raise ValueError(f"unknown mode {mode!r}")
    Q = G.synthesis_mat @ Ggd.analysis_mat
    U = Gp.analysis_mat @ (S @ Q) + kernel_projection(Gp) @ Ggd.analysis_mat
    return Gp.with_analysis(U)


def lambda_reverse(Ggd_p: HSFrameSystem, G: HSFrameSystem, Gp: HSFrameSystem) -> HSFrameSystem:
    """The same construction with the roles of ``G`` and ``Gp`` swapped.

    Not the inverse of :func:`lambda_map` unless the kernels coincide.
    """
    return lambda_map(Ggd_p, Gp, G, mode="inverse")


def lambda_inverse(Ggd_p: HSFrameSystem, G: HSFrameSystem, Gp: HSFrameSystem) -> HSFrameSystem:
    """Exact inverse of ``lambda_map(., G, Gp, "inverse")``.

    Writing ``U_gd = U_G S_G^{-1} Q + Psi`` with ``Psi`` in ``ker T_G``, the
    forward map keeps ``Q`` and sends ``Psi`` to
    ``P' (U_G S_G^{-1} Q + Psi)`` with ``P'`` the projection onto
    ``ker T_{G'}``.  Undoing it needs ``P'`` restricted to ``ker T_G`` to be
    invertible, which the gap hypothesis ``||T_G - T_{G'}|| < sqrt(A_G)/2``
    provides.
    """
    G.require_frame()
    Gp.require_frame()
    G.compatible(Gp)
    Q = Gp.synthesis_mat @ Ggd_p.analysis_mat
    Psi_p = Ggd_p.analysis_mat - Gp.analysis_mat @ (Gp.frame_op_inv @ Q)
    base = G.analysis_mat @ (G.frame_op_inv @ Q)
    if G.rows == G.d:
        return G.with_analysis(base)
    K, Kp = kernel_basis(G), kernel_basis(Gp)
    C = Kp.conj().T @ K
    if not is_invertible(C):
        raise NotInvertibleError("projection between the two kernels is not invertible")
    rhs = Kp.conj().T @ (Psi_p - kernel_projection(Gp) @ base)
    Psi = K @ np.linalg.solve(C, rhs)
    return G.with_analysis(base + Psi)


# ----------------------------------------------------------------------------
# equivalence and uniqueness


def equivalence_criterion_check(
    m: Symbol,
    F: HSFrameSystem,
    G: HSFrameSystem,
    tol: float = 1e-8,
    detect_tol: float = 1e-6,
    cap: int = PROBE_CAP,
) -> MultiplierReport:
    """``M^{-1} = M_{1/m, G~, F^d}`` for all duals  <=>  ``conj(m) F`` equivalent to ``G``.

    The left side is tested on the canonical dual plus the probe duals.  For
    a constant symbol the canonical dual alone must already decide it.
    """
    rep = MultiplierReport(instance=_dims(F))
    constant = bool(np.all(m.values == m.values[0]))
    rep.instance["constant_symbol"] = constant
    mF = F.scaled(m.conj().values)
    Q = equivalence_operator(G, mF, tol)  # conj(m_i) F_i = G_i Q
    equivalent = Q is not None
    M = assemble(m, F, G)
    if not M.is_invertible():
        rep.flag("equivalent_implies_invertible", not equivalent)
        rep.residual("sigma_min_over_max", _cond_ratio(M.matrix))
        return rep
    Minv = np.linalg.inv(M.matrix)
    Gt = canonical_dual(G)
    inv_m = m.reciprocal()
    residuals = [_op(Minv - assemble(inv_m, Gt, Fd).matrix) for Fd in probe_duals(F, cap)]
    canonical_res, worst = residuals[0], max(residuals)
    rep.residual("canonical_formula_residual", canonical_res)
    rep.residual("probe_formula_residual", worst)
    holds = worst <= tol
    rep.flag("formula_iff_equivalent", holds == equivalent, note=f"formula={holds}, equivalent={equivalent}")
    if constant:
        rep.flag("canonical_formula_iff_equivalent", (canonical_res <= tol) == equivalent)
    if equivalent:
        rep.bound("multiplier_equals_QstarS", _op(M.matrix - Q.conj().T @ G.frame_op), tol, slack=0.0)
        rep.bound("gamma_vanishes", gamma(m, F, G).norm, tol, slack=0.0)
    else:
        rep.bound("probe_dual_violation", detect_tol, worst, slack=0.0)
    if holds:
        Qn = equivalence_operator_normalized(G, mF, tol)
        ok = Qn is not None
        rep.flag("normalized_route_exists", ok)
        if ok:
            rep.bound(
                "normalized_route_residual",
                _op(G.analysis_mat @ Qn - mF.analysis_mat), tol, slack=0.0,
            )
    return rep


def duals_determine_frame(G: HSFrameSystem, F: HSFrameSystem, tol: float = EQUALITY_TOL, dual_tol: float = 1e-8, cap: int = PROBE_CAP):
    """``(True, None)`` if ``G == F``; otherwise ``(False, w)`` with ``w`` a
    dual of ``G`` that is not a dual of ``F``.

    ``w`` is searched among the canonical dual of ``G`` and the probe duals.
    ``(False, None)`` would mean the search failed.
    """
    G.compatible(F)
    if systems_equal(G, F, tol):
        return True, None
    for w in probe_duals(G, cap):
        if not is_dual(w, F, dual_tol):
            return False, w
    return False, None
