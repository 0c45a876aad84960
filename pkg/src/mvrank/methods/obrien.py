from mvrank.baselines import obrien_test
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.methods.base import BaseMethod


class OBrienMethod(BaseMethod):
    def get_name(self) -> str:
        return "obrien"

    def handles_survival(self) -> bool:
        return True

    def run(self, data: TwoSampleData, *, seed: int = 0) -> TestOutcome:
        return obrien_test(data, self.alpha, self.options.get("weights"))
