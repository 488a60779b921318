#pragma once

#include "channels.hpp"
#include "circuit.hpp"
#include "circuit_json.hpp"
#include "counts.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "linalg.hpp"
#include "mitigation.hpp"
#include "noise_model.hpp"
#include "report_io.hpp"
#include "simulator.hpp"
#include "transpiler.hpp"
