#pragma once

// Everything except the CLI layer, which pulls in CLI11 and nlohmann/json.
#include "scalekit/block.hpp"
#include "scalekit/counterexamples.hpp"
#include "scalekit/dims.hpp"
#include "scalekit/domination.hpp"
#include "scalekit/enumeration.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/expr.hpp"
#include "scalekit/fin_supp.hpp"
#include "scalekit/io.hpp"
#include "scalekit/log_value.hpp"
#include "scalekit/matrix_socle.hpp"
#include "scalekit/parser.hpp"
#include "scalekit/random.hpp"
#include "scalekit/renorm.hpp"
#include "scalekit/scale.hpp"
#include "scalekit/schwartz.hpp"
#include "scalekit/summability.hpp"
