#pragma once

// vocalics: acoustic feature extraction and speaker-independent linear-SVM
// evaluation for three-level patient-state classification from speech.

#include "vocalics/audio.hpp"
#include "vocalics/corpus.hpp"
#include "vocalics/csv.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/evaluation.hpp"
#include "vocalics/fft.hpp"
#include "vocalics/framing.hpp"
#include "vocalics/functionals.hpp"
#include "vocalics/lld.hpp"
#include "vocalics/matrix.hpp"
#include "vocalics/melbank.hpp"
#include "vocalics/pitch.hpp"
#include "vocalics/rng.hpp"
#include "vocalics/serialize.hpp"
#include "vocalics/spectrogram.hpp"
#include "vocalics/svm.hpp"
#include "vocalics/util.hpp"
