#pragma once

#include "neretin/decorated_complex.hpp"
#include "neretin/genposet.hpp"
#include "neretin/group_json.hpp"
#include "neretin/homology.hpp"
#include "neretin/orbit_count.hpp"
#include "neretin/split_record.hpp"
#include "neretin/spheromorphism.hpp"
#include "neretin/trading.hpp"
