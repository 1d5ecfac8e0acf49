#pragma once

// Umbrella header: acoustic-to-articulatory inversion toolkit.

#include "artinv/acoustics.hpp"
#include "artinv/area_function.hpp"
#include "artinv/articulatory.hpp"
#include "artinv/config.hpp"
#include "artinv/csv.hpp"
#include "artinv/error.hpp"
#include "artinv/formant.hpp"
#include "artinv/formant_estimation.hpp"
#include "artinv/hash.hpp"
#include "artinv/inversion.hpp"
#include "artinv/lpc.hpp"
#include "artinv/maeda_model.hpp"
#include "artinv/model_data.hpp"
#include "artinv/nelder_mead.hpp"
#include "artinv/numfmt.hpp"
#include "artinv/pipeline.hpp"
#include "artinv/records.hpp"
#include "artinv/resample.hpp"
#include "artinv/rng.hpp"
#include "artinv/vtl.hpp"
#include "artinv/wav.hpp"
