#ifndef PARLAB_PARLAB_HPP
#define PARLAB_PARLAB_HPP

#include "parlab/calculus.hpp"
#include "parlab/capacity.hpp"
#include "parlab/classify.hpp"
#include "parlab/clipping.hpp"
#include "parlab/common.hpp"
#include "parlab/distance.hpp"
#include "parlab/exhaustion.hpp"
#include "parlab/fem.hpp"
#include "parlab/graph.hpp"
#include "parlab/io.hpp"
#include "parlab/mesh.hpp"
#include "parlab/mesh_io.hpp"
#include "parlab/meshgen.hpp"
#include "parlab/model.hpp"
#include "parlab/quadrature.hpp"
#include "parlab/rng.hpp"

#endif
