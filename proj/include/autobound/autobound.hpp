#pragma once

// Umbrella header: the full enclosure toolkit.

#include "autobound/apps.hpp"
#include "autobound/autobound1d.hpp"
#include "autobound/autoboundnd.hpp"
#include "autobound/bilinear.hpp"
#include "autobound/errors.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"
#include "autobound/serialize.hpp"
#include "autobound/sharp.hpp"
#include "autobound/tensor.hpp"
#include "autobound/tensor_poly.hpp"
