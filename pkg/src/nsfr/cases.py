"""Benchmark case registry: initial conditions, boundaries, references.

Each case captures the full setup of one benchmark: domain and default grid,
gamma, the initial condition as a function of position, the boundary map,
the final time, and (where available) an exact solution or reference
diagnostics.  Initial conditions return conserved states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import riemann
from .euler import conservative
from .mesh import (DirichletFunction, Periodic, SubsonicOutflow,
                   SupersonicInflow, SupersonicOutflow, Wall)


@dataclass
class TestCase:
    name: str
    dim: int
    xmin: tuple
    xmax: tuple
    default_n: tuple
    gamma: float
    t_end: float
    initial: Callable                  # (x[, y]) -> conserved states
    boundary: object                   # dict or callable for build_mesh
    active_mask: Optional[Callable] = None   # (cx, cy) -> bool, cell centers
    exact: Optional[Callable] = None   # (x[, y], t) -> conserved states
    extract_lines: tuple = ()          # ((axis, value), ...)
    default_cfl: float = 0.5

    def mesh_args(self, n=None):
        return dict(dim=self.dim, xmin=self.xmin, xmax=self.xmax,
                    n=(n if n is not None else self.default_n))


REGISTRY: dict = {}


def register(fn):
    case = fn()
    REGISTRY[case.name] = fn
    return fn


def get_case(name: str, **kwargs) -> TestCase:
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; have {sorted(REGISTRY)}")
    return builder(**kwargs) if kwargs else builder()


# --- smooth convergence case ------------------------------------------------


@register
def case_low_density() -> TestCase:
    """Near-vacuum advected density wave on the periodic square; the
    classical accuracy test for positivity limiters (rho_min = 0.005)."""

    def initial(x, y):
        rho = 1.0 + 0.995 * np.sin(x + y)
        one = np.ones_like(x)
        return conservative(rho, one, one, one)

    def exact(x, y, t):
        rho = 1.0 + 0.995 * np.sin(x + y - 2.0 * t)
        one = np.ones_like(x)
        return conservative(rho, one, one, one)

    return TestCase(
        name="low-density", dim=2, xmin=(0.0, 0.0),
        xmax=(2 * np.pi, 2 * np.pi), default_n=(32, 32), gamma=1.4,
        t_end=0.1, initial=initial, boundary=None, exact=exact)


@register
def case_low_density_1d() -> TestCase:
    """1D analogue of the low-density wave, for quick smoke checks."""

    def initial(x):
        rho = 1.0 + 0.995 * np.sin(x)
        one = np.ones_like(x)
        return conservative(rho, one, np.zeros_like(x), one)

    def exact(x, t):
        rho = 1.0 + 0.995 * np.sin(x - t)
        one = np.ones_like(x)
        return conservative(rho, one, np.zeros_like(x), one)

    return TestCase(
        name="low-density-1d", dim=1, xmin=(0.0,), xmax=(2 * np.pi,),
        default_n=(32,), gamma=1.4, t_end=0.1, initial=initial,
        boundary=None, exact=exact)


# --- 1D shock tubes ---------------------------------------------------------


def _riemann_case(name, left, right, xmin, xmax, x0, t_end, n,
                  with_exact=True, cfl=0.5):
    lw = riemann.PState(*left)
    rw = riemann.PState(*right)

    def initial(x):
        rho = np.where(x < x0, lw.rho, rw.rho)
        u = np.where(x < x0, lw.u, rw.u)
        p = np.where(x < x0, lw.p, rw.p)
        return conservative(rho, u, np.zeros_like(x), p)

    exact = None
    if with_exact:
        def exact(x, t):
            if t <= 0.0:
                return initial(x)
            rho, u, p = riemann.sample(lw, rw, (x - x0) / t)
            return conservative(rho, u, np.zeros_like(x), p)

    return TestCase(
        name=name, dim=1, xmin=(xmin,), xmax=(xmax,), default_n=(n,),
        gamma=1.4, t_end=t_end, initial=initial,
        boundary={(0, 0): SupersonicOutflow(), (0, 1): SupersonicOutflow()},
        exact=exact, default_cfl=cfl)


@register
def case_sod() -> TestCase:
    return _riemann_case("sod", (1.0, 0.0, 1.0), (0.125, 0.0, 0.1),
                         -0.5, 0.5, 0.0, 0.2, 512)


@register
def case_leblanc() -> TestCase:
    """Severe shock tube with a 1e9 pressure ratio (modified Leblanc)."""
    return _riemann_case("leblanc", (2.0, 0.0, 1e9), (0.001, 0.0, 1.0),
                         -10.0, 10.0, 0.0, 1e-4, 512, cfl=0.06)


SHU_OSHER_LEFT = (3.857143, 2.629369, 10.33333)
# feature locations at t = 1.8 (Johnsen et al. reference data)
SHU_OSHER_FEATURES = {"shock": 2.39, "contact": 0.69, "acoustic_head": -2.75}


@register
def case_shu_osher() -> TestCase:
    """Mach-3 shock running into a sinusoidal density field."""
    lw = riemann.PState(*SHU_OSHER_LEFT)

    def initial(x):
        rho = np.where(x < -4.0, lw.rho, 1.0 + 0.2 * np.sin(5.0 * x))
        u = np.where(x < -4.0, lw.u, 0.0)
        p = np.where(x < -4.0, lw.p, 1.0)
        return conservative(rho, u, np.zeros_like(x), p)

    left_state = tuple(conservative(lw.rho, lw.u, 0.0, lw.p))
    return TestCase(
        name="shu-osher", dim=1, xmin=(-5.0,), xmax=(5.0,), default_n=(128,),
        gamma=1.4, t_end=1.8, initial=initial,
        boundary={(0, 0): SupersonicInflow(left_state),
                  (0, 1): SupersonicOutflow()})


def _zigzag_extrema(x, rho, min_amp):
    """Alternating local extrema whose swing exceeds min_amp."""
    kept_x, kept_v = [x[0]], [rho[0]]
    direction = 0
    for xi, vi in zip(x[1:], rho[1:]):
        if direction >= 0 and vi > kept_v[-1]:
            kept_x[-1], kept_v[-1] = xi, vi
            direction = 1
        elif direction <= 0 and vi < kept_v[-1]:
            kept_x[-1], kept_v[-1] = xi, vi
            direction = -1
        elif abs(vi - kept_v[-1]) >= min_amp:
            kept_x.append(xi)
            kept_v.append(vi)
            direction = -direction if direction else \
                (1 if vi > kept_v[-2] else -1)
    return np.array(kept_x), np.array(kept_v)


def shu_osher_features(x: np.ndarray, rho: np.ndarray) -> dict:
    """Locate the shock, contact, and leading acoustic-wave head in a
    density profile at t = 1.8.

    The shock is the steepest descent within a window around the published
    location; the contact is the onset of the frequency-doubled entropy
    waves (first pair of significant density extrema closer than 0.2);
    the acoustic head is the leftmost departure from the post-shock plateau
    by more than 1%.
    """
    x = np.asarray(x)
    rho = np.asarray(rho)
    order = np.argsort(x)
    x, rho = x[order], rho[order]
    # nodal traces duplicate element-interface points; average them so the
    # finite-difference gradient below stays finite
    ux, inv = np.unique(np.round(x, 12), return_inverse=True)
    urho = np.zeros(ux.size)
    np.add.at(urho, inv, rho)
    urho /= np.bincount(inv)
    x, rho = ux, urho
    grad = np.diff(rho) / np.diff(x)
    xm = 0.5 * (x[1:] + x[:-1])

    sel = (xm >= 1.9) & (xm <= 2.9)
    shock = float(xm[sel][np.argmin(grad[sel])])

    contact = np.nan
    ex, _ = _zigzag_extrema(x, rho, min_amp=0.1)
    inside = ex[(ex >= 0.2) & (ex <= 1.3)]
    for a, b in zip(inside, inside[1:]):
        if b - a <= 0.2:
            contact = float(0.5 * (a + b))
            break

    plateau = SHU_OSHER_LEFT[0]
    dev = np.abs(rho - plateau) > 0.01 * plateau
    sel = (x >= -3.6) & (x <= -1.9)
    xa = x[sel][dev[sel]]
    return {
        "shock": shock,
        "contact": contact,
        "acoustic_head": float(xa[0]) if xa.size else np.nan,
    }


# --- strong vortex / shock interaction --------------------------------------

SVSW_SHOCK_MACH = 1.5
SVSW_VORTEX_MACH = 0.9
SVSW_VORTEX_A = 0.075     # inner (solid-body) radius
SVSW_VORTEX_B = 0.175     # outer (decay) radius


def _svsw_vortex(x, y, xc, yc, gamma):
    """Composite vortex: solid-body core, annular decay to zero swirl at
    r = b, isentropic temperature from radial equilibrium."""
    a, b = SVSW_VORTEX_A, SVSW_VORTEX_B
    vm = SVSW_VORTEX_MACH * np.sqrt(gamma)   # ambient a = sqrt(gamma)
    k = vm * a / (a * a - b * b)

    dx = x - xc
    dy = y - yc
    r = np.sqrt(dx * dx + dy * dy)
    r_safe = np.maximum(r, 1e-300)

    vtheta = np.where(
        r <= a, vm * r / a,
        np.where(r <= b, k * (r_safe - b * b / r_safe), 0.0))

    def g_annulus(rr):
        rr = np.maximum(rr, 1e-300)
        return k * k * (0.5 * rr * rr - 2.0 * b * b * np.log(rr)
                        - 0.5 * b**4 / (rr * rr))

    coef = (gamma - 1.0) / gamma
    t_annulus = 1.0 - coef * (g_annulus(b) - g_annulus(np.clip(r, a, b)))
    t_at_a = 1.0 - coef * (g_annulus(b) - g_annulus(a))
    t_core = t_at_a - coef * 0.5 * vm * vm / (a * a) \
        * np.maximum(a * a - r * r, 0.0)
    temp = np.where(r <= a, t_core, np.where(r <= b, t_annulus, 1.0))

    du = -vtheta * dy / r_safe
    dv = vtheta * dx / r_safe
    rho = temp ** (1.0 / (gamma - 1.0))
    p = temp ** (gamma / (gamma - 1.0))
    return rho, du, dv, p


def case_svsw(extended: bool = False) -> TestCase:
    """Stationary M=1.5 normal shock with a strong (M_v=0.9) composite
    vortex superimposed upstream; subsonic outlet pinned at the post-shock
    pressure keeps the shock in place."""
    gamma = 1.4
    u1 = SVSW_SHOCK_MACH * np.sqrt(gamma)
    rho2, u2, p2 = riemann.normal_shock(SVSW_SHOCK_MACH, 1.0, 1.0, gamma)
    xs = 2.0 if extended else 0.5
    xc, yc = 0.25, 0.5

    def initial(x, y):
        rho_v, du, dv, p_v = _svsw_vortex(x, y, xc, yc, gamma)
        pre = x < xs
        rho = np.where(pre, rho_v, rho2)
        u = np.where(pre, u1 + du, u2)
        v = np.where(pre, dv, 0.0)
        p = np.where(pre, p_v, p2)
        return conservative(rho, u, v, p, gamma)

    inflow = tuple(conservative(1.0, u1, 0.0, 1.0, gamma))
    boundary = {(0, 0): SupersonicInflow(inflow),
                (0, 1): SubsonicOutflow(back_pressure=float(p2)),
                (1, 0): Wall(), (1, 1): Wall()}
    if extended:
        return TestCase(
            name="svsw-extended", dim=2, xmin=(0.0, 0.0), xmax=(4.0, 1.0),
            default_n=(200, 50), gamma=gamma, t_end=1.75, initial=initial,
            boundary=boundary, extract_lines=((1, 0.425),))
    return TestCase(
        name="svsw", dim=2, xmin=(0.0, 0.0), xmax=(2.0, 1.0),
        default_n=(300, 150), gamma=gamma, t_end=0.7, initial=initial,
        boundary=boundary, extract_lines=((1, 0.4), (0, 1.05)))


REGISTRY["svsw"] = lambda **kw: case_svsw(extended=False, **kw)
REGISTRY["svsw-extended"] = lambda **kw: case_svsw(extended=True, **kw)


# --- diffraction / reflection / jets ----------------------------------------

DIFFRACTION_LEFT = (7.041132906907898, 4.07794695481336, 30.05945)
DIFFRACTION_MACH = 5.09


@register
def case_shock_diffraction() -> TestCase:
    """Mach 5.09 shock diffracting around a 90-degree corner at (1, 6);
    L-shaped domain realized by masking the solid block [0,1]x[0,6)."""
    lw = DIFFRACTION_LEFT

    def initial(x, y):
        pre = x < 0.5
        rho = np.where(pre, lw[0], 1.4)
        u = np.where(pre, lw[1], 0.0)
        p = np.where(pre, lw[2], 1.0)
        return conservative(rho, u, np.zeros_like(x), p)

    inflow = tuple(conservative(lw[0], lw[1], 0.0, lw[2]))
    boundary = {(0, 0): SupersonicInflow(inflow),
                (0, 1): SupersonicOutflow(),
                (1, 0): SupersonicOutflow(),
                (1, 1): Wall()}

    def active_mask(cx, cy):
        return ~((cx < 1.0) & (cy < 6.0))

    return TestCase(
        name="shock-diffraction", dim=2, xmin=(0.0, 0.0), xmax=(13.0, 11.0),
        default_n=(416, 352), gamma=1.4, t_end=2.3, initial=initial,
        boundary=boundary, active_mask=active_mask, default_cfl=0.45)


DMR_POST = (8.0, 33.0 * np.sqrt(3.0) / 8.0, -33.0 / 8.0, 116.5)
DMR_PRE = (1.4, 0.0, 0.0, 1.0)


def _dmr_shock_x(y, t):
    # shock line y = sqrt(3) (x - 1/6) advancing at horizontal speed 20/sqrt(3)
    return 1.0 / 6.0 + (y + 20.0 * t) / np.sqrt(3.0)


@register
def case_dmr() -> TestCase:
    """Double Mach reflection of a Mach 10 shock on a 60-degree incline,
    on the rectangle extended upward so the top boundary stays passive."""

    def state_at(x, y, t):
        post = x < _dmr_shock_x(y, t)
        rho = np.where(post, DMR_POST[0], DMR_PRE[0])
        u = np.where(post, DMR_POST[1], DMR_PRE[1])
        v = np.where(post, DMR_POST[2], DMR_PRE[2])
        p = np.where(post, DMR_POST[3], DMR_PRE[3])
        return conservative(rho, u, v, p)

    def initial(x, y):
        return state_at(x, y, 0.0)

    post_state = tuple(conservative(*DMR_POST))
    post_fn = DirichletFunction(
        lambda x, y, t: np.broadcast_to(
            np.asarray(post_state), x.shape + (4,)).copy())
    top_fn = DirichletFunction(lambda x, y, t: state_at(x, y, t))

    def boundary(ax, side, center):
        if ax == 0:
            return SupersonicInflow(post_state) if side == 0 \
                else SupersonicOutflow()
        if side == 1:
            return top_fn
        return post_fn if center[0] < 1.0 / 6.0 else Wall()

    return TestCase(
        name="dmr", dim=2, xmin=(0.0, 0.0), xmax=(4.0, 3.0),
        default_n=(240, 180), gamma=1.4, t_end=0.2, initial=initial,
        boundary=boundary, default_cfl=0.15)


def case_astro_jet(mach: int = 80) -> TestCase:
    """High Mach astrophysical jet entering a quiescent ambient gas.

    The inflow slot state is (rho, u, v, p) = (5, u_jet, 0, 0.4127) with
    gamma = 5/3; u_jet = 30 gives Ma ~ 80 and u_jet = 800 gives the quoted
    Ma = 2156.91 relative to the jet sound speed.
    """
    gamma = 5.0 / 3.0
    ambient = (0.5, 0.0, 0.0, 0.4127)
    if mach == 80:
        u_jet, domain, n, t_end = 30.0, ((0.0, -0.5), (2.0, 0.5)), \
            (320, 160), 0.07
    elif mach == 2000:
        u_jet, domain, n, t_end = 800.0, ((-0.5, -0.5), (0.5, 0.5)), \
            (300, 300), 0.001
    else:
        raise ValueError("jet mach must be 80 or 2000")
    jet = (5.0, u_jet, 0.0, 0.4127)

    def initial(x, y):
        z = np.zeros_like(x)
        return conservative(ambient[0] + z, z, z, ambient[3] + z, gamma)

    def left_fn(x, y, t):
        slot = np.abs(y) <= 0.05
        rho = np.where(slot, jet[0], ambient[0])
        u = np.where(slot, jet[1], ambient[1])
        p = np.where(slot, jet[3], ambient[3])
        return conservative(rho, u, np.zeros_like(x), p, gamma)

    boundary = {(0, 0): DirichletFunction(left_fn),
                (0, 1): SupersonicOutflow(),
                (1, 0): SupersonicOutflow(),
                (1, 1): SupersonicOutflow()}
    return TestCase(
        name=f"astro-jet-{mach}", dim=2, xmin=domain[0], xmax=domain[1],
        default_n=n, gamma=gamma, t_end=t_end, initial=initial,
        boundary=boundary, default_cfl=0.01 if mach == 80 else 0.0005)


def jet_inflow_mach(mach: int = 80) -> float:
    gamma = 5.0 / 3.0
    u = 30.0 if mach == 80 else 800.0
    a = np.sqrt(gamma * 0.4127 / 5.0)
    return float(u / a)


REGISTRY["astro-jet-80"] = lambda **kw: case_astro_jet(mach=80, **kw)
REGISTRY["astro-jet-2000"] = lambda **kw: case_astro_jet(mach=2000, **kw)
