from .ball import RealBall
from .golden import Golden
from .lattice import Point3, Mat2, J
from .poly import IntPoly
from .place import Place, INF
from .padic import PadicNumber, PadicPoint, valuation, padic_abs
from .sequence import FibSeq, EaSeq, DeltaSeries, AbcTriple, LimitPoint
from .system import ApproxSystem, SolutionSet, IcInterval, DualPoints
from .approx import FracSeries, AccumulationPoint, ContinuedFraction
