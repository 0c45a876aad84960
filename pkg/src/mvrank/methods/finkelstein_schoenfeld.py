from mvrank.baselines import DEFAULT_PERMUTATIONS, ScoreMap, permutation_test
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.methods.base import BaseMethod


class FinkelsteinSchoenfeldMethod(BaseMethod):
    """Hierarchical comparison in endpoint order; the time-to-event endpoint, if any, comes first."""

    def get_name(self) -> str:
        return "fs"

    def handles_survival(self) -> bool:
        return True

    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome:
        return permutation_test(
            data,
            ScoreMap.FINKELSTEIN_SCHOENFELD,
            self.alpha,
            self.options.get("permutations", DEFAULT_PERMUTATIONS),
            seed,
            exact=self.options.get("exact", False),
            method=self.get_name(),
        )
