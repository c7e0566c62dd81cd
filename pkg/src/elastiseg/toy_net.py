"""Tiny convolutional segmenter with hand-derived backprop and Adam.

Fixed stack: conv3x3(1->8)+ReLU, conv3x3(8->8)+ReLU, conv1x1(8->1)+Sigmoid,
same padding everywhere, so the output probability map matches the input
dimensions. The architecture is deliberately small: the point is the loss,
not the model.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .baselines import bce_loss_grad, dice_loss_grad, surface_loss_grad
from .elastic_loss import PilParams, loss_and_grad
from .fields import as_field, as_mask
from .spectral import SpectralPlan, build_plan

ACT_NONE = "none"
ACT_RELU = "relu"
ACT_SIGMOID = "sigmoid"
_ACT_CODES = {ACT_NONE: 0, ACT_RELU: 1, ACT_SIGMOID: 2}
_ACT_NAMES = {v: k for k, v in _ACT_CODES.items()}

CHECKPOINT_MAGIC = b"EBL1"

LOSS_KINDS = ("pil", "bce", "dice", "surface", "pil+bce")


@dataclass
class ConvLayer:
    weight: np.ndarray  # (out_ch, in_ch, k, k)
    bias: np.ndarray  # (out_ch,)
    activation: str


@dataclass
class ToyNet:
    layers: list

    @classmethod
    def create(cls, seed: int) -> "ToyNet":
        """Seeded init: weights uniform in +-sqrt(1/fan_in), zero bias."""
        rng = np.random.default_rng(seed)
        dims = [(1, 8, 3, ACT_RELU), (8, 8, 3, ACT_RELU), (8, 1, 1, ACT_SIGMOID)]
        layers = []
        for in_ch, out_ch, k, act in dims:
            bound = np.sqrt(1.0 / (in_ch * k * k))
            w = rng.uniform(-bound, bound, size=(out_ch, in_ch, k, k))
            layers.append(ConvLayer(weight=w, bias=np.zeros(out_ch), activation=act))
        return cls(layers=layers)

    def params(self):
        out = []
        for layer in self.layers:
            out.extend([layer.weight, layer.bias])
        return out


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: str = "pil"
    epochs: int = 200
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 4
    seed: int = 0
    pil: PilParams = field(default_factory=PilParams)
    bce_weight: float = 0.0  # only used by loss_kind "pil+bce"

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
        if not (self.lr > 0):
            raise ValueError("lr must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def _conv2d(x, w, b):
    """Same-padding convolution; x (C,H,W), w (O,C,k,k) -> (O,H,W)."""
    out_ch, in_ch, k, _ = w.shape
    _, h, wd = x.shape
    p = k // 2
    xp = np.pad(x, ((0, 0), (p, p), (p, p))) if p else x
    out = np.broadcast_to(b[:, None, None], (out_ch, h, wd)).copy()
    for di in range(k):
        for dj in range(k):
            patch = xp[:, di : di + h, dj : dj + wd]
            out += np.tensordot(w[:, :, di, dj], patch, axes=(1, 0))
    return out


def _activate(z, act):
    if act == ACT_RELU:
        return np.maximum(z, 0.0)
    if act == ACT_SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    return z


def _forward_cached(net: ToyNet, image: np.ndarray):
    """Forward pass keeping per-layer inputs and outputs for backprop."""
    h = image[None, :, :]
    cache = []
    for layer in net.layers:
        z = _conv2d(h, layer.weight, layer.bias)
        a = _activate(z, layer.activation)
        cache.append((h, a))
        h = a
    return h[0], cache


def forward(net: ToyNet, image) -> np.ndarray:
    """Probability map in (0,1), same dims as the input image."""
    out, _ = _forward_cached(net, as_field(image))
    return out


def backward(net: ToyNet, image, grad_out):
    """Exact parameter gradients given dLoss/dOutput.

    Returns a flat list [dW0, db0, dW1, db1, ...] matching net.params().
    """
    image = as_field(image)
    grad_out = as_field(grad_out)
    _, cache = _forward_cached(net, image)
    g = grad_out[None, :, :]
    grads = [None] * (2 * len(net.layers))
    for li in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[li]
        x_in, a = cache[li]
        if layer.activation == ACT_RELU:
            g = g * (a > 0.0)
        elif layer.activation == ACT_SIGMOID:
            g = g * a * (1.0 - a)
        out_ch, in_ch, k, _ = layer.weight.shape
        _, h, w = x_in.shape
        p = k // 2
        xp = np.pad(x_in, ((0, 0), (p, p), (p, p))) if p else x_in
        dw = np.empty_like(layer.weight)
        for di in range(k):
            for dj in range(k):
                patch = xp[:, di : di + h, dj : dj + w]
                dw[:, :, di, dj] = np.tensordot(g, patch, axes=([1, 2], [1, 2]))
        db = g.sum(axis=(1, 2))
        grads[2 * li] = dw
        grads[2 * li + 1] = db
        if li > 0:
            # input gradient: correlate g with the flipped kernel
            gp = np.pad(g, ((0, 0), (p, p), (p, p))) if p else g
            wf = layer.weight[:, :, ::-1, ::-1]
            gx = np.zeros((in_ch, h, w))
            for di in range(k):
                for dj in range(k):
                    patch = gp[:, di : di + h, dj : dj + w]
                    gx += np.tensordot(wf[:, :, di, dj], patch, axes=(0, 0))
            g = gx
    return grads


class Adam:
    """Adam over a list of parameter arrays, updated in place."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads):
        self.t += 1
        for i, (p, g) in enumerate(zip(self.params, grads)):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * g * g
            m_hat = self.m[i] / (1 - self.beta1**self.t)
            v_hat = self.v[i] / (1 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def image_loss_grad(p, g, cfg: TrainConfig, plan: SpectralPlan):
    """Loss value and dLoss/dP for one image under cfg.loss_kind."""
    if cfg.loss_kind == "pil":
        eg = loss_and_grad(g, np.clip(p, 0.0, 1.0), cfg.pil, plan)
        return eg.energy, eg.grad_p
    if cfg.loss_kind == "bce":
        return bce_loss_grad(p, g)
    if cfg.loss_kind == "dice":
        return dice_loss_grad(p, g)
    if cfg.loss_kind == "surface":
        return surface_loss_grad(p, g)
    eg = loss_and_grad(g, np.clip(p, 0.0, 1.0), cfg.pil, plan)
    bl, bg = bce_loss_grad(p, g)
    return eg.energy + cfg.bce_weight * bl, eg.grad_p + cfg.bce_weight * bg


def train(net: ToyNet, data, cfg: TrainConfig, plan: SpectralPlan | None = None):
    """Minibatch Adam training; returns the per-epoch mean loss list.

    Deterministic given cfg.seed (shuffling uses a dedicated generator).
    Aborts on a non-finite loss.
    """
    if not data:
        raise ValueError("empty training set")
    data = [(as_field(img), as_mask(msk)) for img, msk in data]
    h, w = data[0][0].shape
    if plan is None:
        plan = build_plan(w, h)
    params = net.params()
    opt = Adam(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    shuffle_rng = np.random.default_rng(cfg.seed)
    log = []
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(len(data))
        losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            acc = [np.zeros_like(p) for p in params]
            for idx in batch:
                img, msk = data[idx]
                pred = forward(net, img)
                loss, grad_out = image_loss_grad(pred, msk, cfg, plan)
                if not np.isfinite(loss):
                    raise RuntimeError(
                        f"non-finite loss {loss} at epoch {epoch}, image {idx}"
                    )
                losses.append(loss)
                for a, g in zip(acc, backward(net, img, grad_out)):
                    a += g
            opt.step([a / len(batch) for a in acc])
        log.append(float(np.mean(losses)))
    return log


def save_checkpoint(net: ToyNet, path):
    """Versioned binary layout: magic EBL1, layer count, per-layer dims, LE float64."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(net.layers)))
        for layer in net.layers:
            out_ch, in_ch, k, _ = layer.weight.shape
            fh.write(struct.pack("<IIII", in_ch, out_ch, k, _ACT_CODES[layer.activation]))
            fh.write(layer.weight.astype("<f8").tobytes())
            fh.write(layer.bias.astype("<f8").tobytes())


def load_checkpoint(path) -> ToyNet:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"bad checkpoint magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
        (n_layers,) = struct.unpack("<I", fh.read(4))
        layers = []
        for _ in range(n_layers):
            in_ch, out_ch, k, act_code = struct.unpack("<IIII", fh.read(16))
            if act_code not in _ACT_NAMES:
                raise ValueError(f"unknown activation code {act_code}")
            w = np.frombuffer(fh.read(8 * out_ch * in_ch * k * k), dtype="<f8")
            w = w.reshape(out_ch, in_ch, k, k).copy()
            b = np.frombuffer(fh.read(8 * out_ch), dtype="<f8").copy()
            layers.append(ConvLayer(weight=w, bias=b, activation=_ACT_NAMES[act_code]))
    return ToyNet(layers=layers)
