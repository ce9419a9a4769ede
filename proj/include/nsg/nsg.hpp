#pragma once

// umbrella header: the full library surface

#include "nsg/constructions.hpp"
#include "nsg/errors.hpp"
#include "nsg/orthogonality.hpp"
#include "nsg/pointgeom.hpp"
#include "nsg/rational.hpp"
#include "nsg/space.hpp"
#include "nsg/space_spec.hpp"
#include "nsg/tolerance.hpp"
#include "nsg/vector.hpp"
