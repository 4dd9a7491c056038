#pragma once

// Umbrella header for the corpus-audit toolkit.

#include "retaudit/corpus.hpp"
#include "retaudit/engine.hpp"
#include "retaudit/inequality.hpp"
#include "retaudit/queryset.hpp"
#include "retaudit/report.hpp"
#include "retaudit/retrievability.hpp"
#include "retaudit/synth.hpp"
#include "retaudit/usefulness.hpp"
