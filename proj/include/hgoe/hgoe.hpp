#pragma once

#include "hgoe/baseline.hpp"
#include "hgoe/commands.hpp"
#include "hgoe/corpus.hpp"
#include "hgoe/error.hpp"
#include "hgoe/eval.hpp"
#include "hgoe/hypergraph.hpp"
#include "hgoe/indexer.hpp"
#include "hgoe/keywords.hpp"
#include "hgoe/parallel.hpp"
#include "hgoe/random.hpp"
#include "hgoe/ranking.hpp"
#include "hgoe/synthetic.hpp"
#include "hgoe/text.hpp"
#include "hgoe/trec.hpp"
