from mvrank import censored, energytest
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.lds import SequenceKind
from mvrank.methods.base import BaseMethod


class RankEnergyMethod(BaseMethod):
    """Options: ``kind``, ``calibration`` (CalibrationEntry or "table"), ``standardize``."""

    def get_name(self) -> str:
        return energytest.METHOD_NAME

    def handles_survival(self) -> bool:
        return True

    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome:
        test = censored.test_with_survival if data.has_survival else energytest.decide
        return test(
            data,
            self.alpha,
            self.options.get("kind", SequenceKind.SOBOL),
            self.options.get("calibration", "table"),
            standardize=self.options.get("standardize", False),
            seed=seed,
        )
