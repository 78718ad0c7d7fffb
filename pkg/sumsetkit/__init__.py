from sumsetkit.applications import (
    banzhaf,
    banzhaf_index,
    bottleneck_partition,
    card_sums,
    count_sums,
    parse_graph,
)
from sumsetkit.core import (
    CardSumSet,
    Mode,
    MultisetInput,
    SumSet,
    normalize_multiset,
    parse_multiset,
    split_into_two_sets,
)
from sumsetkit.cyclic_engine import cover_units, cover_zm, mod_subset_sums, unit_sums
from sumsetkit.integer_engine import all_subset_sums, decide
from sumsetkit.witness import recover_subset

__all__ = [
    "CardSumSet",
    "Mode",
    "MultisetInput",
    "SumSet",
    "all_subset_sums",
    "banzhaf",
    "banzhaf_index",
    "bottleneck_partition",
    "card_sums",
    "count_sums",
    "cover_units",
    "cover_zm",
    "decide",
    "mod_subset_sums",
    "normalize_multiset",
    "parse_graph",
    "parse_multiset",
    "recover_subset",
    "split_into_two_sets",
    "unit_sums",
]
