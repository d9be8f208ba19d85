#pragma once

#include "modclust/attributes.hpp"
#include "modclust/baseline.hpp"
#include "modclust/datagen.hpp"
#include "modclust/error.hpp"
#include "modclust/fcmd.hpp"
#include "modclust/fcmo.hpp"
#include "modclust/graph.hpp"
#include "modclust/io.hpp"
#include "modclust/membership.hpp"
#include "modclust/parallel.hpp"
#include "modclust/validity.hpp"
