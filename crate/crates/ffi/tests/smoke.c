#include <math.h>
#include <stdio.h>
#include "contpois.h"

int main(void) {
    CpLaw *law = NULL;
    double v = 0.0;
    if (cp_law_poisson_new(1.0, &law) != CP_STATUS_OK) return 1;
    if (cp_law_cdf(law, 1.0, &v) != CP_STATUS_OK || fabs(v - exp(-1.0)) > 1e-15) return 2;
    if (cp_law_quantile(law, 2.0, &v) != CP_STATUS_DOMAIN) return 3;
    char msg[128];
    if (cp_last_error_message(msg, sizeof msg) == 0) return 4;
    CpStream *s = cp_stream_new(7, 0);
    double draws[4];
    if (cp_law_sample(law, s, 4, draws) != CP_STATUS_OK) return 5;
    cp_stream_free(s);
    cp_law_free(law);
    printf("%.17g %s\n", draws[0], msg);
    return 0;
}
