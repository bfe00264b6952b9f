#ifndef CHEEGER_CHEEGER_HPP
#define CHEEGER_CHEEGER_HPP

#include "cheeger/alm.hpp"
#include "cheeger/certify.hpp"
#include "cheeger/cuts.hpp"
#include "cheeger/exact_oracle.hpp"
#include "cheeger/graph.hpp"
#include "cheeger/lbfgsb.hpp"
#include "cheeger/model.hpp"
#include "cheeger/problem.hpp"
#include "cheeger/report.hpp"
#include "cheeger/spectral.hpp"

#endif  // CHEEGER_CHEEGER_HPP
