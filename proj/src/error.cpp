#include "ccaprobe/error.hpp"
