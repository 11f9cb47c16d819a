#pragma once

#include <uexp/bignat.hpp>
#include <uexp/config.hpp>
#include <uexp/error.hpp>
#include <uexp/eval.hpp>
#include <uexp/expip.hpp>
#include <uexp/expr.hpp>
#include <uexp/numth.hpp>
#include <uexp/parse.hpp>
#include <uexp/prove.hpp>
#include <uexp/prsearch.hpp>
#include <uexp/rewrite.hpp>
