"""``bellchain`` command-line driver.

Exit status: 0 on success, 1 on usage errors, 2 on validation or numerical
errors (odd chain length, oversized dimensions, integrity failures).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from bellchain import bell, channels, qudit, teleport
from bellchain.errors import BellChainError
from bellchain.qstate import PureState, load_state, random_haar_state, save_state

MODEL_KINDS = {"heisenberg-nnn": "heisenberg_nnn", "ising": "ising_af", "aklt": "aklt"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_target(text: str) -> PureState:
    """Qubit from ``theta,phi`` Bloch angles or ``a,b`` complex amplitudes (``1+0.5i``)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"target must have two comma-separated fields, got {text!r}")
    try:
        if any(c in text for c in "ij"):
            a, b = (complex(p.replace("i", "j")) for p in parts)
            amps = np.array([a, b])
        else:
            theta, phi = (float(p) for p in parts)
            amps = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    except ValueError as exc:
        raise UsageError(f"malformed target {text!r}: {exc}") from exc
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise UsageError("target amplitudes are both zero")
    return PureState(amps / norm)


def _subspace(text: str) -> bell.BellLabel | None:
    return None if text == "auto" else bell.BellLabel.parse(text)


def _model(args: argparse.Namespace) -> channels.SpinChainModel:
    if args.model is None or args.sites is None:
        raise UsageError("--model and --sites are required")
    boundary = args.boundary or ("open" if args.model == "aklt" else "periodic")
    return channels.SpinChainModel(
        kind=MODEL_KINDS[args.model],
        sites=args.sites,
        beta=args.beta,
        alpha=args.alpha,
        boundary=boundary,
    )


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.subcommand} requires {', '.join(missing)}")


def cmd_ground_state(args: argparse.Namespace) -> None:
    _require(args, "out")
    model = _model(args)
    pair = channels.ground_state(model)
    save_state(pair.state, args.out)
    print(f"model={model.kind} sites={model.sites} beta={model.beta} alpha={model.alpha} boundary={model.boundary}")
    print(f"energy={pair.energy:.15g} degeneracy={pair.degeneracy} residual={pair.residual:.3e}")
    print(f"wrote {args.out}")


def cmd_classify(args: argparse.Namespace) -> None:
    _require(args, "channel")
    state = load_state(args.channel)
    weights = bell.classify(state)
    o = teleport.o_parameter(state)
    print("weights " + json.dumps({k: round(v, 12) for k, v in weights.to_dict().items()}))
    sx, sy, sz = o.components
    print(f"O={o.value:.12g} Sx={sx:.12g} Sy={sy:.12g} Sz={sz:.12g} bound={teleport.fidelity_bound(o):.12g}")


def cmd_teleport(args: argparse.Namespace) -> None:
    _require(args, "channel", "target")
    channel = load_state(args.channel)
    target = parse_target(args.target)
    subspace = _subspace(args.subspace) or bell.classify(channel).argmax()
    n_pairs = channel.sites // 2
    print(f"seed={args.seed} subspace={subspace} pairs={n_pairs}")
    if n_pairs <= 3:
        print("outcomes\tprobability\tcorrection\tfidelity")
        for outcomes in teleport.all_outcomes(n_pairs):
            r = teleport.teleport_branch(channel, target, outcomes, subspace)
            fid = "null" if r.fidelity is None else f"{r.fidelity:.12f}"
            print(f"{' '.join(map(str, outcomes))}\t{r.probability:.12f}\t{r.applied_correction}\t{fid}")
    rng = np.random.default_rng(args.seed)
    fids = []
    for _ in range(args.trials):
        r = teleport.teleport_sample(channel, target, subspace, rng)
        fids.append(r.fidelity)
    if fids:
        print(f"sampled trials={len(fids)} mean_fidelity={np.mean(fids):.12f} min_fidelity={np.min(fids):.12f}")


def cmd_sweep(args: argparse.Namespace) -> None:
    _require(args, "channels", "out")
    sites = args.sites if args.sites is not None else 4
    records = teleport.sweep_experiment(args.channels, sites, args.seed, args.sampler)
    teleport.write_sweep_csv(records, args.out)
    violations = sum(r.fidelity_min < r.bound - 1e-9 for r in records)
    mean_violations = sum(r.worst_target_mean < r.bound - 1e-9 for r in records)
    print(f"seed={args.seed} sampler={args.sampler} sites={sites} channels={len(records)}")
    print(f"branch-minimum violations={violations} branch-average violations={mean_violations}")
    print(f"wrote {args.out}")


def cmd_qudit_demo(args: argparse.Namespace) -> None:
    N = args.local_dim if args.local_dim is not None else 3
    label = qudit.QuditLabel(1 % N, 1 % N)
    channel = qudit.nbell_state(N, label)
    target = random_haar_state(N, args.seed, local_dim=N)
    print(f"seed={args.seed} N={N} channel={label}")
    print("outcome\tprobability\tcorrection\tfidelity")
    for outcome in qudit.all_labels(N):
        r = qudit.qudit_teleport_branch(channel, target, [outcome], label)
        print(f"{outcome}\t{r.probability:.12f}\t{r.applied_correction}\t{r.fidelity:.12f}")


def cmd_cluster_check(args: argparse.Namespace) -> None:
    L = args.sites if args.sites is not None else 2
    before = bell.classify(bell.cluster_state(L))
    _, mapped = bell.cluster_to_bell_subspace(L)
    print(f"sites={L}")
    print("before " + json.dumps({k: round(v, 12) for k, v in before.to_dict().items()}))
    print("after " + json.dumps({k: round(v, 12) for k, v in bell.classify(mapped).to_dict().items()}))


COMMANDS = {
    "ground-state": cmd_ground_state,
    "classify": cmd_classify,
    "teleport": cmd_teleport,
    "sweep": cmd_sweep,
    "qudit-demo": cmd_qudit_demo,
    "cluster-check": cmd_cluster_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellchain", description="Measurement-based teleportation along spin chains.")
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--model", choices=sorted(MODEL_KINDS))
    parser.add_argument("--sites", type=int)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--alpha", type=float, default=1.0 / 3.0)
    parser.add_argument("--boundary", choices=["periodic", "open", "open_with_half_spin_ends"])
    parser.add_argument("--channel", help="state file")
    parser.add_argument("--target", help="'theta,phi' or 'a,b' complex amplitudes")
    parser.add_argument("--subspace", default="auto", choices=["auto", "--", "-+", "+-", "++"])
    parser.add_argument("--channels", type=int)
    parser.add_argument("--trials", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sampler", choices=["haar", "biased"], default="biased")
    parser.add_argument("--local-dim", type=int)
    parser.add_argument("--out", help="output file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 2**64:
        parser.error("--seed must be a non-negative 64-bit integer")
    try:
        COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"bellchain: usage error: {exc}", file=sys.stderr)
        return 1
    except (BellChainError, OSError) as exc:
        print(f"bellchain: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
