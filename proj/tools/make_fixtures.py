#!/usr/bin/env python3
"""Regenerates the files under fixtures/ (ESC-50 metadata and a synthetic
zero-shot dataset). Output is deterministic."""

import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

ESC50_CATEGORIES = {
    "Animal sounds": ["dog", "rooster", "pig", "cow", "frog", "cat", "hen",
                      "insects", "sheep", "crow"],
    "Natural sounds": ["rain", "sea waves", "crackling fire", "crickets",
                       "chirping birds", "water drops", "wind", "pouring water",
                       "toilet flush", "thunderstorm"],
    "Human sounds": ["crying baby", "sneezing", "clapping", "breathing",
                     "coughing", "footsteps", "laughing", "brushing teeth",
                     "snoring", "drinking sipping"],
    "Interior/domestic sounds": ["door wood knock", "mouse click",
                                 "keyboard typing", "door wood creaks",
                                 "can opening", "washing machine",
                                 "vacuum cleaner", "clock alarm", "clock tick",
                                 "glass breaking"],
    "Exterior/urban noises": ["helicopter", "chainsaw", "siren", "car horn",
                              "engine", "train", "church bells", "airplane",
                              "fireworks", "hand saw"],
}

ESC50_RANDOM_FOLDS = {
    "Fold0": ["brushing teeth", "church bells", "clock tick", "cow",
              "drinking sipping", "fireworks", "helicopter", "mouse click",
              "pig", "washing machine"],
    "Fold1": ["clapping", "crickets", "glass breaking", "hand saw",
              "keyboard typing", "laughing", "siren", "sneezing",
              "thunderstorm", "vacuum cleaner"],
    "Fold2": ["breathing", "chainsaw", "chirping birds", "coughing",
              "door wood creaks", "door wood knock", "frog", "pouring water",
              "rain", "train"],
    "Fold3": ["airplane", "can opening", "crying baby", "engine", "footsteps",
              "hen", "insects", "rooster", "snoring", "toilet flush"],
    "Fold4": ["car horn", "cat", "clock alarm", "crackling fire", "crow", "dog",
              "sea waves", "sheep", "water drops", "wind"],
}


def class_id(label):
    return label.replace(" ", "_")


def write_json(path, value):
    path.write_text(json.dumps(value, indent=2) + "\n")


def esc50():
    out = ROOT / "esc50"
    out.mkdir(parents=True, exist_ok=True)
    labels = [l for ls in ESC50_CATEGORIES.values() for l in ls]
    with open(out / "catalog.jsonl", "w") as f:
        for label in labels:
            f.write(json.dumps({"class_id": class_id(label), "label": label}) + "\n")
    write_json(out / "categories.json",
               {class_id(l): cat for cat, ls in ESC50_CATEGORIES.items() for l in ls})
    write_json(out / "category_folds.json",
               {"folds": {cat: [class_id(l) for l in ls]
                          for cat, ls in ESC50_CATEGORIES.items()},
                "roles": {}})
    write_json(out / "random_folds.json",
               {"folds": {name: [class_id(l) for l in ls]
                          for name, ls in ESC50_RANDOM_FOLDS.items()},
                "roles": {}})


def spread_unit_vectors(rng, count, dim, max_cos):
    accepted = []
    while len(accepted) < count:
        v = rng.normal(size=dim)
        v /= np.linalg.norm(v)
        if all(abs(v @ a) <= max_cos for a in accepted):
            accepted.append(v)
    return np.array(accepted)


def fmt(values):
    return "\t".join(repr(float(v)) for v in values)


def synthetic():
    out = ROOT / "synthetic"
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20201)
    dim, per_class, noise = 6, 12, 0.05
    folds = {"Fold0": 1, "Fold1": 1, "Fold2": 8, "Fold3": 2, "Fold4": 3}
    n_classes = sum(folds.values())
    means = spread_unit_vectors(rng, n_classes, dim, 0.6)
    ids = [f"c{i:02d}" for i in range(n_classes)]

    with open(out / "catalog.jsonl", "w") as f:
        for i, cid in enumerate(ids):
            f.write(json.dumps({"class_id": cid, "label": f"synthetic class {i}"}) + "\n")
    with open(out / "semantic.tsv", "w") as f:
        f.write(f"#dim={dim}\n#kind=semantic\n")
        for cid, m in zip(ids, means):
            f.write(f"{cid}\t{fmt(m)}\n")
    with open(out / "acoustic.tsv", "w") as fa, open(out / "samples.tsv", "w") as fs:
        fa.write(f"#dim={dim}\n#kind=acoustic\n")
        fs.write("#binding=acoustic.tsv\n")
        for cid, m in zip(ids, means):
            for j in range(per_class):
                sid = f"{cid}_s{j:02d}"
                fa.write(f"{sid}\t{fmt(m + noise * rng.normal(size=dim))}\n")
                fs.write(f"{sid}\t{cid}\n")
    plan, start = {}, 0
    for name, size in folds.items():
        plan[name] = ids[start:start + size]
        start += size
    write_json(out / "plan.json", {
        "folds": plan,
        "roles": {"model-train": ["Fold0", "Fold1"], "zsl-train": ["Fold2"],
                  "zsl-validation": ["Fold3"], "zsl-test": ["Fold4"]}})
    with open(out / "identity_model.txt", "w") as f:
        f.write(json.dumps({"acoustic_dim": dim, "semantic_dim": dim, "lambda": 0.0,
                            "seed": 0, "notes": "identity"}) + "\n")
        for row in np.eye(dim):
            f.write(fmt(row) + "\n")
    write_json(out / "train_config.json", {
        "lambda_grid": [0, 0.01, 1, 10], "learning_rate": 0.01, "epochs": 30,
        "seed": 7, "early_stop_patience": 10})


if __name__ == "__main__":
    esc50()
    synthetic()
