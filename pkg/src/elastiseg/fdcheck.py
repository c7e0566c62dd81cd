"""Central finite-difference verification of analytic gradients.

Shared by the gradcheck CLI command and the test suite. The FD side is the
independent oracle: it only ever calls the scalar loss, never the analytic
gradient path.
"""

import numpy as np

from .baselines import bce_loss_grad, dice_loss_grad, surface_loss_grad
from .elastic_loss import PilParams, loss_and_grad
from .toy_net import ToyNet, backward, forward, image_loss_grad


def fd_grad(loss_fn, p: np.ndarray, step: float) -> np.ndarray:
    """Central differences of a scalar loss over every entry of p."""
    out = np.zeros_like(p)
    flat = p.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = loss_fn(p)
        flat[i] = orig - step
        dn = loss_fn(p)
        flat[i] = orig
        out.ravel()[i] = (up - dn) / (2.0 * step)
    return out


def max_rel_error(analytic: np.ndarray, fd: np.ndarray) -> float:
    """Max elementwise |a - f| / max(|a|, |f|, floor).

    The floor is 1e-4 of the overall gradient scale so that entries far
    below the gradient magnitude are judged against the field scale
    instead of their own (FD roundoff dominates there).
    """
    scale = max(float(np.max(np.abs(analytic), initial=0.0)),
                float(np.max(np.abs(fd), initial=0.0)), 1e-12)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1e-4 * scale)
    return float(np.max(np.abs(analytic - fd) / denom))


def check_loss_grad(loss: str, g, p, plan, params: PilParams | None = None,
                    step: float = 1e-5) -> float:
    """Max relative FD error of one pixel-loss gradient on (g, p).

    For the elastic loss, pixels whose level set sits within 2*step of a
    Heaviside kink are excluded (FD straddles the non-smooth point there).
    """
    params = params or PilParams()
    if loss == "pil":
        analytic = loss_and_grad(g, p, params, plan).grad_p
        fd = fd_grad(lambda q: loss_and_grad(g, q, params, plan).energy, p, step)
        phi = p - 0.5
        ok = np.abs(np.abs(phi) - params.heaviside.beta) > 2.0 * step
        return max_rel_error(analytic[ok], fd[ok])
    fns = {"bce": bce_loss_grad, "dice": dice_loss_grad, "surface": surface_loss_grad}
    fn = fns[loss]
    _, analytic = fn(p, g)
    fd = fd_grad(lambda q: fn(q, g)[0], p, step)
    return max_rel_error(analytic, fd)


def check_net_grad(net: ToyNet, image, mask, cfg, plan, n_params: int = 20,
                   step: float = 1e-4, seed: int = 0) -> float:
    """Max relative FD error over sampled network parameters, full loss chain."""
    rng = np.random.default_rng(seed)
    pred = forward(net, image)
    _, grad_out = image_loss_grad(pred, mask, cfg, plan)
    analytic = backward(net, image, grad_out)
    params = net.params()

    def scalar_loss():
        return image_loss_grad(forward(net, image), mask, cfg, plan)[0]

    worst = 0.0
    gmax = max(float(np.max(np.abs(a))) for a in analytic)
    floor = 1e-4 * max(gmax, 1e-12)
    sizes = [p.size for p in params]
    total = sum(sizes)
    for _ in range(n_params):
        flat_idx = int(rng.integers(total))
        pi = 0
        while flat_idx >= sizes[pi]:
            flat_idx -= sizes[pi]
            pi += 1
        arr = params[pi].ravel()
        orig = arr[flat_idx]
        arr[flat_idx] = orig + step
        up = scalar_loss()
        arr[flat_idx] = orig - step
        dn = scalar_loss()
        arr[flat_idx] = orig
        fd = (up - dn) / (2.0 * step)
        an = analytic[pi].ravel()[flat_idx]
        worst = max(worst, abs(an - fd) / max(abs(an), abs(fd), floor))
    return worst
