from tango.autodiff.tensor import Tensor, as_matrix
from tango.autodiff.tape import GradientMap, Node, Tape
from tango.autodiff.ops import get_op, op_kinds, record
from tango.autodiff.engine import backward, grad
from tango.autodiff.checks import finite_diff_check, hessian_vector_product, numerical_gradient

__all__ = [
    "Tensor",
    "as_matrix",
    "Tape",
    "Node",
    "GradientMap",
    "record",
    "get_op",
    "op_kinds",
    "backward",
    "grad",
    "finite_diff_check",
    "hessian_vector_product",
    "numerical_gradient",
]
