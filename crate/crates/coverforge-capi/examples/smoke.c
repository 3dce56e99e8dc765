#include <assert.h>
#include <stdio.h>
#include <string.h>
#include "coverforge.h"

int main(void) {
    uint64_t cf[3] = {3, 3, 3};
    CfTower *t = NULL;
    assert(cf_tower_ostrowski(cf, 3, 3, &t) == CfOk);
    assert(cf_tower_depth(t) == 3);
    assert(cf_tower_validate(t) == CfOk);
    uint64_t w[2];
    uintptr_t written = 0;
    assert(cf_tower_weights(t, 3, w, 2, &written) == CfOk);
    assert(written == 2 && w[0] == 33 && w[1] == 10);
    char *dot = NULL;
    assert(cf_tower_to_dot(t, 1, &dot) == CfOk);
    assert(strstr(dot, "w=3") != NULL);
    cf_string_free(dot);
    cf_tower_free(t);
    printf("capi smoke ok\n");
    return 0;
}
