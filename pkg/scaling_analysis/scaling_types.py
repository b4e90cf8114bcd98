from typing import Literal, Optional

from pydantic import BaseModel, Field

FitDomain = Literal["x", "inverse_ccr"]
Parity = Literal["even", "odd"]


class SeriesPoint(BaseModel):
    """
    Ensemble statistics of one observable at one separation. `mean` is None
    when no rows exist; an empty point is never reported as zero.
    """
    observable: str
    x: Optional[int] = Field(None, description="Separation in bonds; None for explicitly placed spins.")
    layer: Optional[int] = Field(None, description="Layer index for time-resolved points.")
    mean: Optional[float] = None
    stderr: Optional[float] = Field(None, description="Sample standard deviation over sqrt(n_total).")
    n_total: int = 0
    n_positive: int = Field(0, description="Rows with a strictly positive value (hits).")

    @property
    def empty(self) -> bool:
        return self.mean is None


class FitExclusions(BaseModel):
    parity: Optional[Parity] = Field(None, description="Keep only even or only odd x.")
    exclude_x: list[int] = Field(default_factory=list, description="Separations left out explicitly.")
    exclude_last: bool = Field(False, description="Leave out the largest remaining x.")


class ExcludedPoint(BaseModel):
    x: int
    reason: Literal["parity", "explicit", "last", "non_positive_mean", "empty"]


class WeightedFit(BaseModel):
    alpha: float
    alpha_err: float


class FitResult(BaseModel):
    """
    mean ~ u^-alpha by least squares on (log u, log mean), u = x or 1/eta.
    """
    observable: str
    domain: FitDomain = "x"
    alpha: float
    alpha_err: Optional[float] = Field(None, description="Slope standard error; None with only two points.")
    intercept: float
    points_used: list[SeriesPoint]
    excluded: list[ExcludedPoint] = Field(default_factory=list)
    weighted: Optional[WeightedFit] = Field(None, description="Same fit weighted by the log-space stderr.")


class OrderingCheck(BaseModel):
    alpha_E: float
    alpha_W: float
    alpha_I2: float
    w_decays_faster: bool
    i2_decays_faster: bool

    @property
    def holds(self) -> bool:
        return self.w_decays_faster and self.i2_decays_faster
