#pragma once

#include "accent/adaptation.hpp"
#include "accent/anova.hpp"
#include "accent/error.hpp"
#include "accent/harness.hpp"
#include "accent/lattice.hpp"
#include "accent/lexicon.hpp"
#include "accent/model_params.hpp"
#include "accent/parallel.hpp"
#include "accent/params_io.hpp"
#include "accent/phone_features.hpp"
#include "accent/recognizer.hpp"
#include "accent/symbol_table.hpp"
#include "accent/transcription.hpp"
#include "accent/utf8.hpp"
#include "accent/word_hmm.hpp"
