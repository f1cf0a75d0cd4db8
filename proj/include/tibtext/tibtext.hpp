#pragma once

#include "tibtext/align.hpp"
#include "tibtext/align_oracle.hpp"
#include "tibtext/cleaning.hpp"
#include "tibtext/corpus.hpp"
#include "tibtext/document.hpp"
#include "tibtext/error.hpp"
#include "tibtext/lexicon.hpp"
#include "tibtext/linear_model.hpp"
#include "tibtext/resources.hpp"
#include "tibtext/segment.hpp"
#include "tibtext/stem.hpp"
#include "tibtext/stylo.hpp"
#include "tibtext/syllable.hpp"
#include "tibtext/util.hpp"
#include "tibtext/wylie.hpp"
