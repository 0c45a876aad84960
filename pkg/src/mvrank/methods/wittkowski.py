from mvrank.baselines import DEFAULT_PERMUTATIONS, ScoreMap, permutation_test
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.methods.base import BaseMethod


class WittkowskiMethod(BaseMethod):
    """Majority score map by default; ``variant="all"`` selects the all-endpoints rule."""

    def get_name(self) -> str:
        return "wittkowski"

    def handles_survival(self) -> bool:
        return True

    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome:
        phi = ScoreMap.WITTKOWSKI_ALL if self.options.get("variant") == "all" else ScoreMap.WITTKOWSKI_MAJORITY
        return permutation_test(
            data,
            phi,
            self.alpha,
            self.options.get("permutations", DEFAULT_PERMUTATIONS),
            seed,
            exact=self.options.get("exact", False),
            method=self.get_name(),
        )
