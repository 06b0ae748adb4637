from tango.graphs.graph import Graph, dirichlet_energy, laplacian_apply, laplacian_matrix, laplacian_max_eigenvalue
from tango.graphs.generators import FAMILIES, barbell, generate_family
from tango.graphs.targets import Targets, bfs_distances, compute_targets
from tango.graphs.datasets import DatasetSplit, GraphSample, barbell_demo, build_gpp_dataset, make_sample
from tango.graphs.io import read_dataset, write_dataset
