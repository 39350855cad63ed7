#pragma once

// Face + periocular biometric fusion: WD-LBP features, PCA reduction,
// CCA feature-level fusion, thresholded nearest-neighbor identification.

#include "cca.hpp"
#include "classify.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "lbp.hpp"
#include "linalg.hpp"
#include "manifest.hpp"
#include "model_io.hpp"
#include "pca.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "synth.hpp"
#include "wavelet.hpp"
