import csv
import os
import random
import shutil

import pytest

TOPICS = [
    ["zeppelin", "reunion", "plant", "contract", "tour", "band"],
    ["isis", "fighters", "border", "video", "captured", "claims"],
    ["apple", "watch", "battery", "launch", "price", "store"],
    ["meteor", "crater", "village", "scientists", "rock", "impact"],
]


def write_corpus(directory, prefix, pairs=60, bodies=8, seed=1):
    rng = random.Random(seed)
    body_rows = []
    for b in range(bodies):
        words = TOPICS[b % len(TOPICS)]
        text = ". ".join(" ".join(rng.choice(words) for _ in range(9)) for _ in range(4))
        body_rows.append((str(100 + b), text + "."))
    stance_rows = []
    for i in range(pairs):
        b = rng.randrange(bodies)
        topic = TOPICS[b % len(TOPICS)]
        stance = rng.choice(["agree", "disagree", "discuss", "unrelated", "unrelated"])
        if stance == "unrelated":
            topic = TOPICS[(b + 1) % len(TOPICS)]
        cue = {"agree": "Confirmed", "disagree": "Hoax", "discuss": "Reportedly"}.get(stance, "")
        headline = (cue + " " + " ".join(rng.choice(topic) for _ in range(4))).strip()
        stance_rows.append((f"{headline} {i}", str(100 + b), stance))
    stances = os.path.join(directory, f"{prefix}_stances.csv")
    bodies_path = os.path.join(directory, f"{prefix}_bodies.csv")
    with open(stances, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["Headline", "Body ID", "Stance"])
        w.writerows(stance_rows)
    with open(bodies_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["Body ID", "articleBody"])
        w.writerows(body_rows)
    return stances, bodies_path


@pytest.fixture
def corpus_files(tmp_path):
    train = write_corpus(tmp_path, "train", seed=1)
    test = write_corpus(tmp_path, "test", pairs=30, seed=2)
    return train, test


@pytest.fixture
def cli():
    path = os.environ.get("FNCSTANCE_CLI") or shutil.which("fncstance")
    if not path:
        pytest.skip("fncstance executable not found; set FNCSTANCE_CLI")
    return path
