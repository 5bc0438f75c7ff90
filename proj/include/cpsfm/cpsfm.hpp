#ifndef CPSFM_CPSFM_HPP
#define CPSFM_CPSFM_HPP

#include "cpsfm/errors.hpp"
#include "cpsfm/cheb_series.hpp"
#include "cpsfm/bessel.hpp"
#include "cpsfm/waveform.hpp"
#include "cpsfm/transforms.hpp"
#include "cpsfm/oracle.hpp"
#include "cpsfm/io.hpp"

#endif
