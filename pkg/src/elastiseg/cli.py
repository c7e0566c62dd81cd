"""Command-line surface: phantoms, energy, gradcheck, evolve, train, eval, bench.

Exit codes are a stable contract for CI: 0 success/pass, 1 check failure,
2 usage or I/O error. Every command is deterministic given its flags
(timings excluded).
"""

import argparse
import glob
import os
import sys

import numpy as np

from . import fdcheck, pgm
from .elastic_loss import PilParams, bench_paths, energy_direct, energy_spectral, loss_and_grad
from .evolve import DivergenceError, EvolveConfig, gradient_flow, mask_init
from .fields import HARDTANH, HeavisideSpec, apply_heaviside, prob_to_levelset
from .metrics import aggregate, report
from .phantom import PhantomSpec, generate
from .spectral import build_plan
from .toy_net import TrainConfig, ToyNet, forward, load_checkpoint, save_checkpoint, train

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Usage or I/O problem; maps to exit code 2."""


def _load_field(path):
    if not os.path.exists(path):
        raise CliError(f"no such file: {path}")
    try:
        return pgm.read_image(path)
    except pgm.PgmError as e:
        raise CliError(str(e))


def _load_mask(path):
    if not os.path.exists(path):
        raise CliError(f"no such file: {path}")
    try:
        return pgm.read_mask(path)
    except pgm.PgmError as e:
        raise CliError(str(e))


def cmd_phantom(args):
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as e:
        raise CliError(f"cannot create output dir {args.out}: {e}")
    if not os.access(args.out, os.W_OK):
        raise CliError(f"output dir not writable: {args.out}")
    rows = ["id,seed,foreground_frac"]
    for i in range(args.n):
        spec = PhantomSpec(
            width=args.size, height=args.size, n_branches=args.branches,
            contrast=args.contrast, noise_sigma=args.noise, seed=args.seed + i,
        )
        image, mask = generate(spec)
        pgm.write_pgm(os.path.join(args.out, f"img_{i:04d}.pgm"), image)
        pgm.write_pgm(os.path.join(args.out, f"msk_{i:04d}.pgm"), mask)
        rows.append(f"{i},{spec.seed},{mask.mean():.6f}")
    with open(os.path.join(args.out, "manifest.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {args.n} phantom pairs to {args.out}")
    return EXIT_OK


def cmd_energy(args):
    g = _load_mask(args.gt)
    p = _load_field(args.pred)
    if g.shape != p.shape:
        raise CliError(f"dimension mismatch: gt {g.shape} vs pred {p.shape}")
    h, w = g.shape
    plan = build_plan(w, h)
    params = PilParams(alpha=args.alpha, heaviside=HeavisideSpec(beta=args.beta))
    phi = prob_to_levelset(p)
    d = g - args.alpha * apply_heaviside(phi, params.heaviside)
    e_spec = energy_spectral(d, plan, params.prefactor)
    print(f"E_spectral = {e_spec:.12e}")
    if args.oracle:
        e_dir = energy_direct(d, plan, params.prefactor)
        rel = abs(e_dir - e_spec) / max(abs(e_spec), 1e-300)
        print(f"E_direct   = {e_dir:.12e}")
        print(f"rel_diff   = {rel:.3e}")
    return EXIT_OK


def cmd_gradcheck(args):
    rng = np.random.default_rng(12345)
    plan = build_plan(args.size, args.size)
    tol = 1e-4 if args.net else 1e-5
    worst = 0.0
    if args.net:
        cfg = TrainConfig(loss_kind=args.loss if args.loss == "pil" else args.loss)
        for s in range(args.seeds):
            net = ToyNet.create(seed=1000 + s)
            small = build_plan(8, 8)
            img = rng.uniform(0, 1, (8, 8))
            msk = (rng.uniform(0, 1, (8, 8)) > 0.6).astype(np.float64)
            worst = max(worst, fdcheck.check_net_grad(net, img, msk, cfg, small, seed=s))
    else:
        for s in range(args.seeds):
            g = (rng.uniform(0, 1, (args.size, args.size)) > 0.6).astype(np.float64)
            p = rng.uniform(0.02, 0.98, (args.size, args.size))
            worst = max(worst, fdcheck.check_loss_grad(args.loss, g, p, plan))
    status = "PASS" if worst <= tol else "FAIL"
    print(f"{status}: max relative gradient error {worst:.3e} (tol {tol:.0e})")
    return EXIT_OK if worst <= tol else EXIT_CHECK_FAILED


def cmd_evolve(args):
    g = _load_mask(args.gt)
    h, w = g.shape
    plan = build_plan(w, h)
    if args.init == "uniform":
        p0 = np.full_like(g, 0.5)
    else:
        p0 = mask_init(np.roll(g, args.shift, axis=1), beta=args.beta)
    cfg = EvolveConfig(
        alpha=args.alpha, heaviside=HeavisideSpec(beta=args.beta),
        eta=args.eta, max_steps=args.steps, snapshot_every=args.snapshot_every,
    )
    try:
        trace = gradient_flow(p0, g, cfg, plan)
    except DivergenceError as e:
        print(f"diverged: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "energy.csv"), "w") as fh:
        fh.write("step,energy\n")
        for i, e in enumerate(trace.energies):
            fh.write(f"{i},{e:.12e}\n")
    if trace.snapshots:
        for i, snap in enumerate(trace.snapshots):
            pgm.write_pgm(os.path.join(args.out, f"snap_{i:04d}.pgm"), snap)
    print(f"final IoU = {trace.iou_final:.4f} after {len(trace.energies)} steps")
    return EXIT_OK


def _load_dataset(data_dir):
    imgs = sorted(glob.glob(os.path.join(data_dir, "img_*.pgm")))
    if not imgs:
        raise CliError(f"no img_*.pgm files in {data_dir}")
    pairs = []
    for ip in imgs:
        mp = ip.replace("img_", "msk_")
        if not os.path.exists(mp):
            raise CliError(f"missing mask for {ip}")
        pairs.append((pgm.read_pgm(ip), pgm.read_mask(mp)))
    return pairs


def cmd_train(args):
    data = _load_dataset(args.data)
    h, w = data[0][0].shape
    cfg = TrainConfig(
        loss_kind=args.loss, epochs=args.epochs, lr=args.lr, seed=args.seed,
        batch_size=args.batch_size, bce_weight=args.bce_weight,
        pil=PilParams(alpha=args.alpha, heaviside=HeavisideSpec(beta=args.beta)),
    )
    net = ToyNet.create(seed=args.seed)
    log = train(net, data, cfg, build_plan(w, h))
    save_checkpoint(net, args.out)
    print(f"trained {args.epochs} epochs, final mean loss {log[-1]:.6e}")
    print(f"checkpoint written to {args.out}")
    return EXIT_OK


def cmd_eval(args):
    try:
        net = load_checkpoint(args.model)
    except (OSError, ValueError) as e:
        raise CliError(f"cannot load checkpoint {args.model}: {e}")
    data = _load_dataset(args.data)
    reports = []
    rows = ["method,loss,image_id,sens,spec,f1,auc"]
    for i, (img, msk) in enumerate(data):
        r = report(forward(net, img), msk)
        reports.append(r)
        rows.append(
            f"toynet,{args.label},{i},{r.sensitivity:.6f},{r.specificity:.6f},"
            f"{r.f1:.6f},{r.auc:.6f}"
        )
    agg = aggregate(reports)
    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(
        f"macro: sens={agg.macro_sensitivity:.4f} spec={agg.macro_specificity:.4f} "
        f"f1={agg.macro_f1:.4f} auc={agg.macro_auc:.4f}"
    )
    print(
        f"micro: sens={agg.micro_sensitivity:.4f} spec={agg.micro_specificity:.4f} "
        f"f1={agg.micro_f1:.4f}"
    )
    print(f"metrics written to {args.out}")
    return EXIT_OK


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_paths(sizes, repeats=args.repeats)
    print("size,t_fft_ns,t_direct_ns,ratio")
    for n, t_fft, t_direct, ratio in rows:
        print(f"{n},{t_fft:.0f},{t_direct:.0f},{ratio:.2f}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="elastiseg",
        description="Elastic-interaction boundary loss: energies, gradients, "
        "level-set flow, toy training on synthetic vessel phantoms.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate synthetic vessel phantoms")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--contrast", type=float, default=0.6)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--branches", type=int, default=7)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("energy", help="evaluate the boundary energy of a prediction")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--alpha", type=float, default=0.35)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--oracle", action="store_true",
                   help="also run the O(N^2) direct sum and print the difference")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--loss", choices=["pil", "bce", "dice", "surface"], default="pil")
    p.add_argument("--net", action="store_true",
                   help="check the full chain through the toy network (tol 1e-4)")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("evolve", help="level-set gradient flow toward a mask")
    p.add_argument("--gt", required=True)
    p.add_argument("--init", choices=["shifted", "uniform"], default="shifted")
    p.add_argument("--shift", type=int, default=6)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--snapshot-every", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("train", help="train the toy segmenter on a phantom directory")
    p.add_argument("--data", required=True)
    p.add_argument("--loss", choices=["pil", "bce", "dice", "surface", "pil+bce"],
                   default="pil")
    p.add_argument("--epochs", type=int, default=200,
                   help="desk-scale default; full-scale runs in the source "
                   "setting use 500")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.35)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--bce-weight", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a phantom directory")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", default="", help="loss column value in the CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time FFT vs direct energy paths")
    p.add_argument("--sizes", default="16,32,64,128")
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
