#pragma once

#include "gzsl/calibration.hpp"
#include "gzsl/data_model.hpp"
#include "gzsl/error.hpp"
#include "gzsl/io.hpp"
#include "gzsl/metrics.hpp"
#include "gzsl/models.hpp"
#include "gzsl/pipeline.hpp"
#include "gzsl/splits.hpp"
#include "gzsl/synthetic.hpp"
