// Umbrella header for the numerical core.
#pragma once

#include "anicurve/convex_body.hpp"
#include "anicurve/counterexample_lab.hpp"
#include "anicurve/flow_engine.hpp"
#include "anicurve/functionals.hpp"
#include "anicurve/soliton_solver.hpp"
#include "anicurve/sphere_calculus.hpp"
