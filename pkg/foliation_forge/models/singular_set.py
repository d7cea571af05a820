import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

from tqdm import tqdm

from ..chart import GridSpec, exact_node
from ..defaults import DEFAULT_THREADS
from ..multivector import rank_at
from ..utils import chunks
from .base import describe

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingularSetEntry:
    point: Tuple
    rank: int
    label: str


@dataclass(frozen=True)
class SingularSetReport:
    grid: GridSpec
    entries: Tuple[SingularSetEntry, ...]

    @property
    def singular(self):
        return tuple(entry for entry in self.entries if entry.rank < 2)

    @property
    def ranks_even(self):
        return all(entry.rank % 2 == 0 for entry in self.entries)

    def count(self, label):
        return sum(1 for entry in self.entries if entry.label == label)


def _label(rank, singular_label):
    if rank == 2:
        return "Regular"
    if rank == 0:
        return singular_label
    return "Nondegenerate" if rank > 2 else "Singular"


def _classify_chunk(P, nodes, singular_label):
    entries = []
    for node in nodes:
        point = exact_node(node) if P.is_exact else tuple(float(c) for c in node)
        rank = rank_at(P.bivector, point, exact=P.is_exact)
        entries.append(SingularSetEntry(tuple(node), rank, _label(rank, singular_label)))
    return entries


def classify_singular_set(P, grid, threads=DEFAULT_THREADS, progress=True, chunk_size=2000):
    """Rank and label at every grid node, in lexicographic node order.

    Exact structures are ranked exactly at the rational value of each node, so nodes on the
    singular set need no exclusion ball.
    """
    if not grid.within(P.chart):
        raise ValueError(f"Grid {grid.counts} leaves the box of chart {P.chart.names}")
    nodes = sorted(grid.nodes())
    singular_label = describe(P).singular_label
    LOGGER.info(f"Classifying {len(nodes)} nodes of {P.model_tag} on {max(1, threads)} thread(s)")

    batches = list(chunks(nodes, chunk_size))
    entries = []
    with tqdm(total=len(nodes), unit="node", disable=not progress) as bar:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            for batch, result in zip(
                batches,
                executor.map(lambda batch: _classify_chunk(P, batch, singular_label), batches),
            ):
                entries.extend(result)
                bar.update(len(batch))
    report = SingularSetReport(grid, tuple(entries))
    LOGGER.debug(f"{len(report.singular)} singular node(s) out of {len(entries)}")
    return report
