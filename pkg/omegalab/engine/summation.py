"""Compensated summation for cancellation-heavy sums (Weyl terms, MC blocks)."""
import numpy as np


def two_sum(u: float, v: float) -> tuple[float, float]:
    """Error-free transformation: u + v = s + t exactly, s = round(u + v)."""
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class CompensatedSum:
    """
    Running complex sum carried as (s, t) pairs per component, following
    Shewchuk's accumulation from the least significant end.
    """

    def __init__(self, value: complex = 0.0):
        self._re = [float(np.real(value)), 0.0]
        self._im = [float(np.imag(value)), 0.0]

    @staticmethod
    def _add(acc: list, y: float) -> None:
        y, u = two_sum(y, acc[1])
        acc[0], acc[1] = two_sum(y, acc[0])
        if acc[0] == 0:
            acc[0] = u
        else:
            acc[1] += u

    def add(self, value: complex) -> None:
        self._add(self._re, float(np.real(value)))
        self._add(self._im, float(np.imag(value)))

    def add_many(self, values) -> None:
        """Accumulate ``values`` in descending order of magnitude."""
        values = np.asarray(values, dtype=complex)
        for value in values[np.argsort(-np.abs(values), kind="stable")]:
            self.add(value)

    def merge(self, other: "CompensatedSum") -> None:
        for part in (other._re[1], other._re[0]):
            self._add(self._re, part)
        for part in (other._im[1], other._im[0]):
            self._add(self._im, part)

    @property
    def value(self) -> complex:
        return complex(self._re[0] + self._re[1], self._im[0] + self._im[1])
