#pragma once

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/circuit_builder.hpp"
#include "parity_qaoa/depth_scan.hpp"
#include "parity_qaoa/driver_synth.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/gf2.hpp"
#include "parity_qaoa/parallel.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"
#include "parity_qaoa/qaoa_engine.hpp"
#include "parity_qaoa/reduce_explicit.hpp"
#include "parity_qaoa/rng.hpp"
#include "parity_qaoa/simulator.hpp"

namespace parity_qaoa {

inline constexpr const char *version = "0.1.0";

}  // namespace parity_qaoa
