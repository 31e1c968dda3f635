#pragma once

#include "smlab/builder.hpp"
#include "smlab/card_spec.hpp"
#include "smlab/checker.hpp"
#include "smlab/dot.hpp"
#include "smlab/exemplars.hpp"
#include "smlab/fo/automorphisms.hpp"
#include "smlab/fo/formula.hpp"
#include "smlab/fo/structure.hpp"
#include "smlab/iso.hpp"
#include "smlab/label_ops.hpp"
#include "smlab/label_structure.hpp"
#include "smlab/roundtrip.hpp"
