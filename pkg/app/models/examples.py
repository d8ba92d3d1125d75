from pydantic import Field, model_validator

from app.models.base import FrozenModel


class HybridExampleParams(FrozenModel):
    """Two-state stock (50 or 200) times a survival indicator, with a constant
    market price of risk `kappa` and no mortality risk premium."""

    p_I: float = Field(0.9, gt=0.0, le=1.0, description="P[I = 1]")
    p_Y: float = Field(0.5, ge=0.0, le=1.0, description="P[Y = 200]")
    p_I_given_up: float = Field(0.92, ge=0.0, le=1.0, description="P[I = 1 | Y = 200]")
    beta: float = Field(0.5, ge=0.0)
    kappa: float = Field(0.05, description="Shift of the up-probability under q")

    @property
    def p_Y_given_alive(self) -> float:
        return self.p_I_given_up * self.p_Y / self.p_I

    @property
    def p_Y_given_dead(self) -> float:
        if self.p_I == 1.0:
            return self.p_Y
        return (self.p_Y - self.p_I_given_up * self.p_Y) / (1.0 - self.p_I)

    @property
    def q_Y(self) -> float:
        return self.p_Y + self.kappa

    @property
    def q_Y_given_alive(self) -> float:
        return self.p_Y_given_alive + self.kappa

    @property
    def q_Y_given_dead(self) -> float:
        return self.p_Y_given_dead + self.kappa

    def p_table(self) -> tuple[float, float, float, float]:
        """P over (50, 0), (50, 1), (200, 0), (200, 1)."""
        up_alive = self.p_I_given_up * self.p_Y
        up_dead = self.p_Y - up_alive
        down_alive = self.p_I - up_alive
        down_dead = 1.0 - self.p_Y - down_alive
        return down_dead, down_alive, up_dead, up_alive

    def q_table(self) -> tuple[float, float, float, float]:
        alive, dead = self.p_I, 1.0 - self.p_I
        return (
            dead * (1.0 - self.q_Y_given_dead),
            alive * (1.0 - self.q_Y_given_alive),
            dead * self.q_Y_given_dead,
            alive * self.q_Y_given_alive,
        )

    @model_validator(mode="after")
    def _check_tables(self) -> "HybridExampleParams":
        tol = 1e-12
        if any(w < -tol for w in self.p_table()):
            raise ValueError("p_I, p_Y and p_I_given_up do not define a joint law")
        for name in ("p_Y_given_alive", "q_Y", "q_Y_given_alive", "q_Y_given_dead"):
            x = getattr(self, name)
            if not -tol <= x <= 1.0 + tol:
                raise ValueError(f"{name} = {x!r} is not a probability")
        return self


class ComonotonicParams(FrozenModel):
    """Two outcomes, (Y, I) = (50, 0) or (200, 1): the stock rises exactly when
    the policyholder survives."""

    p: float = Field(0.6, gt=0.0, lt=1.0, description="P[(Y, I) = (200, 1)]")
    q: float = Field(0.55, gt=0.0, lt=1.0, description="Q[(Y, I) = (200, 1)]")
    beta: float = Field(0.5, ge=0.0)
