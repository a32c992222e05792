from __future__ import annotations

import base64
import json
import os
from datetime import date
from pathlib import Path
from types import SimpleNamespace

import pytest

from vizcat.catalog import parse_example, scan_repository
from vizcat.model import Capabilities, Catalog, ContainerRef, ExampleRecord, Tag, TagCategory
from vizcat.packager import Mode, PackageConfig, PullPolicy, Runtime, SlurmParams
from vizcat.search import SearchQuery, SortKey

SEED_ROOT = Path(__file__).resolve().parent.parent / "catalog"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# 1x1 transparent PNG, fixed bytes.
PNG_BYTES = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAACklEQVR4nGNgAAAAAgAB4iG8MwAAAABJRU5ErkJggg=="
)


@pytest.fixture(scope="session")
def seed_root() -> Path:
    return SEED_ROOT


@pytest.fixture(scope="session")
def seed_catalog() -> Catalog:
    catalog, report = scan_repository(SEED_ROOT)
    assert not report.has_errors
    return catalog


# --- synthetic in-memory catalogs for randomized differential tests ----

TAG_POOL = [
    ("Vector", TagCategory.DATA_TYPE),
    ("Scalar", TagCategory.DATA_TYPE),
    ("Tensor", TagCategory.DATA_TYPE),
    ("2D", TagCategory.DATA_TYPE),
    ("3D", TagCategory.DATA_TYPE),
    ("Time-Dependent", TagCategory.DATA_TYPE),
    ("Points", TagCategory.DATA_TYPE),
    ("Glyphs", TagCategory.TECHNIQUE),
    ("Isosurface", TagCategory.TECHNIQUE),
    ("Streamlines", TagCategory.TECHNIQUE),
    ("Volume Rendering", TagCategory.TECHNIQUE),
    ("LIC", TagCategory.TECHNIQUE),
    ("CFD", TagCategory.DOMAIN),
    ("Climate", TagCategory.DOMAIN),
    ("Medical", TagCategory.DOMAIN),
    ("Astrophysics", TagCategory.DOMAIN),
    ("Materials", TagCategory.DOMAIN),
]

WORDS = [
    "vector", "velocity", "vortex", "volume", "visual", "glyph", "glyphs",
    "flow", "fluid", "field", "surface", "iso", "isosurface", "render",
    "rendering", "grid", "mesh", "particle", "trace", "stream", "slice",
    "temperature", "pressure", "ocean", "wind", "plasma", "dark", "matter",
    "energy", "shear", "jet", "2d", "3d",
]

AUTHORS = ["Jana Keller", "Mei Chen", "Tomas Lindqvist", "Priya Nair", "Aiko Tanaka", "vizcat team"]

CAP_FLAGS = ("preview", "mpi", "slurm", "dataset_replaceable")


def synth_record(rng, index: int) -> ExampleRecord:
    title = " ".join(
        w.capitalize() if rng.random() < 0.5 else w
        for w in rng.sample(WORDS, rng.randint(1, 4))
    )
    pool = rng.sample(TAG_POOL, rng.randint(1, 5))
    tags = {}
    data_type = rng.choice([t for t in TAG_POOL if t[1] is TagCategory.DATA_TYPE])
    for name, category in [data_type] + pool:
        tags.setdefault(name.casefold(), Tag(name, category))
    mpi = rng.random() < 0.5
    slurm = rng.random() < 0.4
    single_task = slurm and not mpi
    record = ExampleRecord(
        slug=f"ex-{index:03d}",
        title=title,
        authors=tuple(rng.sample(AUTHORS, rng.randint(1, 2))),
        added=date(2020 + rng.randint(0, 5), rng.randint(1, 12), rng.randint(1, 28)),
        tags=tuple(tags.values()),
        capabilities=Capabilities(
            preview=rng.random() < 0.3,
            mpi=mpi,
            slurm=slurm,
            dataset_replaceable=rng.random() < 0.5,
        ),
        container=ContainerRef("registry.example.org/vizcat/pv-base:5.11", ("run",)),
        sections={
            "description": " ".join(rng.choices(WORDS, k=rng.randint(0, 12))),
            "instructions": "run it",
            "limitations": "",
            "references": "",
            "resources": "",
        },
        images=("01.png",) if rng.random() < 0.7 else (),
        single_task=single_task,
    )
    return record


def make_catalog(records) -> Catalog:
    examples = {r.slug: r for r in records}
    vocabulary = {}
    for slug in sorted(examples):
        for tag in examples[slug].tags:
            vocabulary.setdefault(tag.folded, tag)
    return Catalog(examples=examples, tag_vocabulary=frozenset(vocabulary.values()), root=Path("."))


def synth_catalog(rng, max_size: int = 50) -> Catalog:
    return make_catalog(synth_record(rng, i) for i in range(rng.randint(0, max_size)))


def synth_query(rng) -> SearchQuery:
    text = ""
    roll = rng.random()
    if roll < 0.45:
        words = rng.choices(WORDS, k=rng.randint(1, 2))
        words = [w[: rng.randint(1, len(w))] if rng.random() < 0.5 else w for w in words]
        text = " ".join(words)
    elif roll < 0.55:
        text = rng.choice(["zzz", "qqq", "!!!", "   "])
    tags = frozenset(
        rng.choice([name, name.upper(), name.lower()])
        for name, _ in rng.sample(TAG_POOL, rng.randint(0, 2))
    )
    caps = frozenset(rng.sample(CAP_FLAGS, rng.randint(0, 2)))
    author = rng.choice([None, "keller", "MEI", "team", "nobody"])
    added_from = added_to = None
    if rng.random() < 0.4:
        a = date(2020 + rng.randint(0, 5), rng.randint(1, 12), rng.randint(1, 28))
        b = date(2020 + rng.randint(0, 5), rng.randint(1, 12), rng.randint(1, 28))
        added_from, added_to = min(a, b), max(a, b)
        if rng.random() < 0.3:
            added_to = None
    sort = rng.choice([None, *SortKey])
    return SearchQuery(
        text=text,
        required_tags=tags,
        author=author,
        added_from=added_from,
        added_to=added_to,
        caps=caps,
        sort=sort,
        page=rng.randint(0, 3),
        page_size=rng.randint(1, 10),
    )


# --- fixture example folder for packaging tests ------------------------

FIXTURE_SLUG = "fixture-example"


def write_fixture_example(root: Path) -> Path:
    """Deterministic example folder used by the packaging golden matrix."""
    folder = root / FIXTURE_SLUG
    (folder / "resources" / "data").mkdir(parents=True)
    (folder / "container").mkdir()
    meta = {
        "title": "Fixture Example",
        "authors": ["vizcat team"],
        "added": "2024-01-01",
        "tags": [
            {"name": "Vector", "category": "DataType"},
            {"name": "Glyphs", "category": "Technique"},
            {"name": "CFD", "category": "Domain"},
        ],
        "capabilities": {
            "preview": False,
            "mpi": True,
            "slurm": True,
            "dataset_replaceable": True,
        },
        "container": {
            "image": "registry.example.org/vizcat/pv-base:5.11",
            "entrypoint": ["pvbatch", "pipeline.py"],
            "recipe": "container/",
        },
        "single_task": False,
    }
    (folder / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    (folder / "description.md").write_text("Fixture pipeline for packaging tests.\n")
    (folder / "instructions.md").write_text("Run the generated bundle.\n")
    for name in ("limitations", "references", "resources"):
        (folder / f"{name}.md").write_text("")
    (folder / "resources" / "pipeline.py").write_text('print("render")\n')
    (folder / "resources" / "data" / "input.csv").write_text("a,b\n1,2\n")
    (folder / "container" / "Dockerfile").write_text("FROM scratch\n")
    (folder / "container" / "spack.yaml").write_text("spack:\n  specs: []\n")
    return folder


@pytest.fixture
def fixture_record(tmp_path) -> ExampleRecord:
    folder = write_fixture_example(tmp_path)
    record, report = parse_example(folder)
    assert record is not None and not report.entries
    return record


GOLDEN_DATASET = "/data/example/input"

GOLDEN_CONFIGS: dict[str, PackageConfig] = {
    "docker-local": PackageConfig(
        runtime=Runtime.DOCKER, mode=Mode.LOCAL, dataset_path=GOLDEN_DATASET
    ),
    "docker-mpi": PackageConfig(
        runtime=Runtime.DOCKER, mode=Mode.MPI, ranks=4, dataset_path=GOLDEN_DATASET
    ),
    "docker-slurm": PackageConfig(
        runtime=Runtime.DOCKER,
        mode=Mode.SLURM,
        dataset_path=GOLDEN_DATASET,
        slurm=SlurmParams(
            partition="batch", nodes=2, tasks_per_node=4, walltime="00:30:00", account="vizcat"
        ),
    ),
    "apptainer-local": PackageConfig(
        runtime=Runtime.APPTAINER, mode=Mode.LOCAL, dataset_path=GOLDEN_DATASET
    ),
    "apptainer-mpi": PackageConfig(
        runtime=Runtime.APPTAINER, mode=Mode.MPI, ranks=4, dataset_path=GOLDEN_DATASET
    ),
    "apptainer-slurm": PackageConfig(
        runtime=Runtime.APPTAINER,
        mode=Mode.SLURM,
        dataset_path=GOLDEN_DATASET,
        slurm=SlurmParams(
            partition="batch", nodes=2, tasks_per_node=4, walltime="00:30:00", account="vizcat"
        ),
    ),
}


# --- stub container runtimes -------------------------------------------

STUB_SOURCE = """#!/usr/bin/env python3
import json, os, sys

name = os.path.basename(sys.argv[0])
args = sys.argv[1:]
if args == ["--version"]:
    print(f"{name.capitalize()} version 24.0.7, build stub")
    sys.exit(0)
log = os.environ.get("VIZCAT_STUB_LOG")
if log:
    with open(log, "a") as fh:
        fh.write(json.dumps([name] + args) + "\\n")
if name == "docker" and args[:2] == ["image", "inspect"]:
    sys.exit(1)  # image never cached: forces the conditional pull
if "exit-with" in args:
    sys.exit(int(args[args.index("exit-with") + 1]))
sys.exit(0)
"""

STUB_TOOLS = ("docker", "apptainer", "mpirun", "sbatch", "srun")


@pytest.fixture
def stub_runtime(tmp_path, monkeypatch):
    bin_dir = tmp_path / "stub-bin"
    bin_dir.mkdir()
    log = tmp_path / "stub-invocations.jsonl"
    for tool in STUB_TOOLS:
        path = bin_dir / tool
        path.write_text(STUB_SOURCE)
        path.chmod(0o755)
    monkeypatch.setenv("PATH", f"{bin_dir}:{os.environ['PATH']}")
    monkeypatch.setenv("VIZCAT_STUB_LOG", str(log))

    def invocations():
        if not log.exists():
            return []
        return [json.loads(line) for line in log.read_text().splitlines()]

    def reset():
        if log.exists():
            log.unlink()

    return SimpleNamespace(bin_dir=bin_dir, log=log, invocations=invocations, reset=reset)
