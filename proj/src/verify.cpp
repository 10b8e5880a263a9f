#include "hetsys/verify.hpp"
