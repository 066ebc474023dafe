"""Command-line interface.

Every subcommand resolves a :class:`RunConfig` (defaults, then ``--config``
file, then ``--seed``/``--out``/``--<key>`` flags), does its work and writes
``manifest-<command>.cfg`` into the output directory. Re-running the same
subcommand with that file as ``--config`` reproduces the outputs bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .autoencoder import load_model, save_model
from .baselines import gbtm_fit, kmeans_fit, kml_fit, kml_membership, kml_select
from .config import OPTIONS, RunConfig
from .errors import ConfigError, DeepTrajError
from .evaluation import (adjusted_rand_index, calinski_harabasz, gaussian_membership,
                         membership_correlation)
from .io import (ensure_dir, load_labels, load_table, load_trajectories,
                 save_embedding, save_labels, save_loss_history, save_matrix, save_membership,
                 save_table, save_trajectories)
from .optimizer import ArchConfig, TrainConfig, train
from .partition import MembershipMatrix
from .pipeline import cluster_embedding, embed
from .simulation import SimulationConfig, simulate_qol
from .svg import KINDS, render_svg

log = logging.getLogger("deeptraj")

SECTIONS = {
    "simulate": ("sim",),
    "train": ("io", "arch", "train"),
    "embed": ("io",),
    "cluster": ("io", "cluster"),
    "kml": ("io", "kml"),
    "gbtm": ("io", "gbtm"),
    "evaluate": ("io", "evaluate"),
    "plot": ("plot",),
    "reproduce-sim": ("sim", "arch", "train", "cluster", "kml"),
}


# ---------------------------------------------------------------- config helpers

def sim_config(cfg: RunConfig) -> SimulationConfig:
    return SimulationConfig(seed=cfg["seed"], **cfg.section("sim"))


def arch_config(cfg: RunConfig) -> ArchConfig:
    return ArchConfig(**cfg.section("arch"))


def train_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(seed=cfg["seed"], **cfg.section("train"))


def _require(cfg: RunConfig, key: str) -> str:
    if not cfg[key]:
        raise ConfigError(f"{key} must be set (flag --{key} or config file)")
    return cfg[key]


def _aligned_labels(ids, path) -> np.ndarray:
    label_ids, labels = load_labels(path)
    lookup = dict(zip(label_ids, labels))
    missing = [s for s in ids if s not in lookup]
    if missing:
        raise DeepTrajError(f"{path}: no label for subject(s) {', '.join(missing[:5])}")
    return np.array([lookup[s] for s in ids])


def _save_centers(path, centers) -> None:
    centers = np.atleast_2d(centers)
    save_table(path, ["cluster"] + [f"t{j}" for j in range(centers.shape[1])],
               [str(j) for j in range(centers.shape[0])], centers)


def _save_scores(path, scores: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "ch"])
        for k, v in scores.items():
            w.writerow([k, repr(float(v))])


def _load_membership(path) -> MembershipMatrix:
    header, ids, probs = load_table(path)
    p = Path(path)
    tag = f"{p.parent.name}/{p.stem}" if p.parent.name else p.stem
    return MembershipMatrix(probs, tag, [h.removeprefix("p_") for h in header[1:]])


# ---------------------------------------------------------------- subcommands

def cmd_simulate(cfg: RunConfig, out: Path) -> None:
    ds, labels = simulate_qol(sim_config(cfg))
    save_trajectories(ds, out / "trajectories.csv")
    save_labels(out / "labels.csv", ds.subject_ids, labels, column="group")
    log.info("simulated %d subjects x %d time points", ds.n_subjects, ds.n_times)


def cmd_train(cfg: RunConfig, out: Path) -> None:
    ds = load_trajectories(_require(cfg, "io.data"))
    model, history = train(ds, arch_config(cfg), train_config(cfg))
    save_model(model, out / "model.npz")
    save_loss_history(out / "loss_history.csv", history)
    log.info("trained %d epochs, final loss %.6g", len(history), history[-1])


def cmd_embed(cfg: RunConfig, out: Path) -> None:
    model = load_model(_require(cfg, "io.model"))
    ds = load_trajectories(_require(cfg, "io.data"))
    save_embedding(out / "embedding.csv", ds.subject_ids, embed(model, ds))


def cmd_cluster(cfg: RunConfig, out: Path) -> None:
    _, ids, z = load_table(_require(cfg, "io.embedding"))
    c = cfg.section("cluster")
    part = cluster_embedding(z, c["k"], c["method"], c["linkage"], c["restarts"], cfg["seed"])
    save_labels(out / "partition.csv", ids, part.assignments)
    save_membership(out / "membership.csv", ids, gaussian_membership(z, part).probs)


def cmd_kml(cfg: RunConfig, out: Path) -> None:
    ds = load_trajectories(_require(cfg, "io.data"))
    c = cfg.section("kml")
    if c["k"] > 0:
        part = kml_fit(ds, c["k"], c["metric"], c["restarts"], cfg["seed"], c["max_iter"])
    else:
        part, scores = kml_select(ds, range(c["k_min"], c["k_max"] + 1), c["metric"], c["restarts"],
                                  cfg["seed"], c["max_iter"])
        _save_scores(out / "ch_scores.csv", scores)
    save_labels(out / "partition.csv", ds.subject_ids, part.assignments)
    save_membership(out / "membership.csv", ds.subject_ids, kml_membership(ds, part).probs)
    _save_centers(out / "centers.csv", part.centers)
    log.info("kml chose k=%d", part.k)


def cmd_gbtm(cfg: RunConfig, out: Path) -> None:
    ds = load_trajectories(_require(cfg, "io.data"))
    c = cfg.section("gbtm")
    model, members, history = gbtm_fit(ds, c["k"], c["order"], cfg["seed"], c["max_iter"],
                                       n_starts=c["starts"])
    save_labels(out / "partition.csv", ds.subject_ids, members.hard())
    save_membership(out / "membership.csv", ds.subject_ids, members.probs)
    _save_centers(out / "centers.csv", model.mean_trajectories())
    with open(out / "loglik.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "loglik"])
        for i, ll in enumerate(history, start=1):
            w.writerow([i, repr(ll)])


def cmd_evaluate(cfg: RunConfig, out: Path) -> None:
    lines = []
    points = None
    if cfg["io.embedding"]:
        _, _, points = load_table(cfg["io.embedding"])
    elif cfg["io.data"]:
        points = load_trajectories(cfg["io.data"]).values
    if points is not None:
        scores = {}
        for k in range(cfg["evaluate.k_min"], cfg["evaluate.k_max"] + 1):
            scores[k] = calinski_harabasz(points, kmeans_fit(points, k, 20, cfg["seed"] + 1000 * k))
        _save_scores(out / "ch_scores.csv", scores)
        best = max(scores, key=lambda k: (scores[k], -k))
        lines.append(f"calinski-harabasz best k: {best} ({scores[best]:.6g})")
    if cfg["io.partition"] and cfg["io.labels"]:
        ids, part = load_labels(cfg["io.partition"])
        truth = _aligned_labels(ids, cfg["io.labels"])
        lines.append(f"adjusted rand index: {adjusted_rand_index(part, truth):.6f}")
    if cfg["io.memberships"]:
        report = membership_correlation([_load_membership(p) for p in cfg["io.memberships"]])
        save_matrix(out / "coherence.csv", report.names, report.matrix)
        with open(out / "coherence.txt", "w") as fh:
            fh.write(report.summary())
        lines.append(f"mean matched membership correlation: {report.mean_matched:.6f}")
    if not lines:
        raise ConfigError("evaluate needs io.embedding/io.data, io.partition + io.labels, or io.memberships")
    with open(out / "evaluation.txt", "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        log.info(line)


def _plot_groups(cfg: RunConfig, ids):
    return _aligned_labels(ids, cfg["plot.groups"]) if cfg["plot.groups"] else None


def cmd_plot(cfg: RunConfig, out: Path) -> None:
    kind = cfg["plot.kind"]
    if kind not in KINDS:
        raise ConfigError(f"plot.kind must be one of {KINDS}")
    src = _require(cfg, "plot.input")
    if kind == "trajectories":
        ds = load_trajectories(src)
        data = {"values": ds.values, "groups": _plot_groups(cfg, ds.subject_ids)}
    elif kind == "embedding_scatter":
        _, ids, z = load_table(src)
        data = {"points": z, "groups": _plot_groups(cfg, ids)}
    elif kind == "ch_bars":
        _, ks, vals = load_table(src)
        data = {"ks": [int(k) for k in ks], "scores": vals[:, 0]}
    else:
        _, _, curves = load_table(src)
        data = {"curves": curves}
        if cfg["plot.background"]:
            bg = load_trajectories(cfg["plot.background"])
            data["background"] = bg.values
            data["groups"] = _plot_groups(cfg, bg.subject_ids)
    render_svg(kind, data, out / f"{kind}.svg")


def cmd_reproduce_sim(cfg: RunConfig, out: Path) -> None:
    seed = cfg["seed"]
    ds, labels = simulate_qol(sim_config(cfg))
    ids = ds.subject_ids
    save_trajectories(ds, out / "trajectories.csv")
    save_labels(out / "labels.csv", ids, labels, column="group")

    model, history = train(ds, arch_config(cfg), train_config(cfg))
    save_model(model, out / "model.npz")
    save_loss_history(out / "loss_history.csv", history)
    z = embed(model, ds)
    save_embedding(out / "embedding.csv", ids, z)
    c = cfg.section("cluster")
    ae_part = cluster_embedding(z, c["k"], c["method"], c["linkage"], c["restarts"], seed)
    ae_members = gaussian_membership(z, ae_part, method="autoencoder")
    save_labels(out / "ae_partition.csv", ids, ae_part.assignments)
    save_membership(out / "ae_membership.csv", ids, ae_members.probs)

    k = cfg.section("kml")
    kml_part, scores = kml_select(ds, range(k["k_min"], k["k_max"] + 1), k["metric"], k["restarts"],
                                  seed, k["max_iter"])
    kml_members = kml_membership(ds, kml_part)
    save_labels(out / "kml_partition.csv", ids, kml_part.assignments)
    save_membership(out / "kml_membership.csv", ids, kml_members.probs)
    _save_centers(out / "kml_centers.csv", kml_part.centers)
    _save_scores(out / "kml_ch_scores.csv", scores)

    report = membership_correlation([ae_members, kml_members])
    save_matrix(out / "coherence.csv", report.names, report.matrix)

    times = np.arange(ds.n_times) * cfg["sim.dt"]
    render_svg("trajectories", {"values": ds.values, "groups": labels, "times": times,
                                "title": "Simulated quality of life (A: sine, B: flat)"},
               out / "trajectories.svg")
    render_svg("ch_bars", {"ks": list(scores), "scores": list(scores.values()),
                           "title": "kml Calinski-Harabasz by k"}, out / "kml_ch_bars.svg")
    render_svg("mean_curves", {"curves": kml_part.centers, "background": ds.values,
                               "groups": kml_part.assignments, "times": times,
                               "title": f"kml best partition (k={kml_part.k})"},
               out / "kml_mean_curves.svg")
    render_svg("embedding_scatter", {"points": z, "groups": labels,
                                     "title": "Autoencoder embedding by true group"},
               out / "embedding.svg")

    ae_ari = adjusted_rand_index(ae_part, labels)
    kml_ari = adjusted_rand_index(kml_part, labels)
    summary = [
        f"final training loss: {history[-1]:.6g}",
        f"autoencoder + {c['method']} (k={c['k']}) ARI vs truth: {ae_ari:.6f}",
        f"kml selected k: {kml_part.k}",
        f"kml ARI vs truth: {kml_ari:.6f}",
        f"membership coherence (mean matched r): {report.mean_matched:.6f}",
    ]
    with open(out / "summary.txt", "w") as fh:
        fh.write("\n".join(summary) + "\n")
    for line in summary:
        log.info(line)


COMMANDS = {
    "simulate": (cmd_simulate, "generate the simulated quality-of-life dataset"),
    "train": (cmd_train, "train the recurrent autoencoder on a trajectory CSV"),
    "embed": (cmd_embed, "embed trajectories with a trained model"),
    "cluster": (cmd_cluster, "cluster an embedding (kmeans or agglomerative)"),
    "kml": (cmd_kml, "longitudinal K-means, optionally selecting k by Calinski-Harabasz"),
    "gbtm": (cmd_gbtm, "EM mixture of polynomial trajectories"),
    "evaluate": (cmd_evaluate, "CH sweep, ARI against labels, membership coherence"),
    "plot": (cmd_plot, "render one SVG figure"),
    "reproduce-sim": (cmd_reproduce_sim, "run the whole simulated-data experiment"),
}


def manifest_name(command: str) -> str:
    return f"manifest-{command}.cfg"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deeptraj", description="Recurrent-autoencoder clustering of trajectories.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value configuration file, e.g. a previous run manifest")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("-v", "--verbose", action="store_true")
        for key, opt in OPTIONS.items():
            if key.split(".")[0] in SECTIONS[name]:
                p.add_argument(f"--{key}", dest=f"opt:{key}", metavar="VALUE",
                               help=f"{opt.help} (default: {opt.default!r})")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.set("seed", args.seed)
    if args.out is not None:
        cfg.set("out", args.out)
    for dest, value in vars(args).items():
        if dest.startswith("opt:") and value is not None:
            cfg.set(dest[4:], value)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        cfg = resolve_config(args)
        out = ensure_dir(cfg["out"])
        COMMANDS[args.command][0](cfg, out)
        manifest = out / manifest_name(args.command)
        with open(manifest, "w") as fh:
            fh.write(cfg.to_text(f"deeptraj {args.command}\nreplay: deeptraj {args.command} --config {manifest}"))
    except (DeepTrajError, OSError, ValueError) as exc:
        print(f"deeptraj {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
