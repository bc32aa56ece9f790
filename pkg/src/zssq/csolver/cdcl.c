/* cdcl.c - compact CDCL SAT solver with a standard DIMACS interface.
 *
 * Reads a DIMACS CNF file (argv[1]), prints "s SATISFIABLE" plus "v" value
 * lines or "s UNSATISFIABLE", and exits 10 / 20 accordingly.
 *
 * Techniques: two watched literals, first-UIP clause learning, activity
 * (VSIDS) decisions via a binary heap, phase saving, Luby restarts, and
 * LBD-based learned-clause reduction. Fully deterministic.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

/* clause layout: cls[0] = size, cls[1] = lbd (0 for problem clauses),
 * literals start at cls + 2 */
#define LITS(c) ((c) + 2)

typedef struct { int **data; int sz, cap; } pvec;

static void pv_push(pvec *v, int *x) {
    if (v->sz == v->cap) {
        v->cap = v->cap ? v->cap * 2 : 8;
        v->data = (int **)realloc(v->data, v->cap * sizeof(int *));
        if (!v->data) { fprintf(stderr, "c out of memory\n"); exit(1); }
    }
    v->data[v->sz++] = x;
}

static int nvars;
static int *assign;     /* var -> 0 / +1 / -1 */
static int *level;
static int **reason;    /* var -> clause or NULL */
static int *trail, trail_sz, qhead;
static int *trail_lim, ntl;
static pvec *watches;   /* literal index 2v (pos), 2v+1 (neg) -> clauses */
static double *activity;
static double var_inc = 1.0;
static char *phase;
static char *seen;
static int *heap, heap_sz, *heap_pos;
static pvec learnts;
static long conflicts = 0, decisions = 0, propagations = 0;

static int lit_idx(int l) { return l > 0 ? 2 * l : -2 * l + 1; }
static int val(int l) { int a = assign[abs(l)]; return l > 0 ? a : -a; }

/* ---- decision heap (max-heap on activity) ---- */

static int heap_less(int a, int b) {
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
}

static void heap_up(int i) {
    int v = heap[i];
    while (i > 0) {
        int p = (i - 1) >> 1;
        if (!heap_less(v, heap[p])) break;
        heap[i] = heap[p]; heap_pos[heap[i]] = i; i = p;
    }
    heap[i] = v; heap_pos[v] = i;
}

static void heap_down(int i) {
    int v = heap[i];
    for (;;) {
        int c = 2 * i + 1;
        if (c >= heap_sz) break;
        if (c + 1 < heap_sz && heap_less(heap[c + 1], heap[c])) c++;
        if (!heap_less(heap[c], v)) break;
        heap[i] = heap[c]; heap_pos[heap[i]] = i; i = c;
    }
    heap[i] = v; heap_pos[v] = i;
}

static void heap_insert(int v) {
    if (heap_pos[v] >= 0) return;
    heap[heap_sz] = v; heap_pos[v] = heap_sz; heap_sz++;
    heap_up(heap_sz - 1);
}

static int heap_pop(void) {
    int v = heap[0];
    heap_pos[v] = -1;
    heap[0] = heap[--heap_sz];
    if (heap_sz > 0) { heap_pos[heap[0]] = 0; heap_down(0); }
    return v;
}

static void bump(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
        for (int u = 1; u <= nvars; u++) activity[u] *= 1e-100;
        var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(heap_pos[v]);
}

/* ---- core ---- */

static int *alloc_clause(const int *lits, int size, int lbd) {
    int *c = (int *)malloc((size + 2) * sizeof(int));
    if (!c) { fprintf(stderr, "c out of memory\n"); exit(1); }
    c[0] = size; c[1] = lbd;
    memcpy(LITS(c), lits, size * sizeof(int));
    return c;
}

static void watch_clause(int *c) {
    pv_push(&watches[lit_idx(LITS(c)[0])], c);
    pv_push(&watches[lit_idx(LITS(c)[1])], c);
}

static void enqueue(int l, int *r) {
    int v = abs(l);
    assign[v] = l > 0 ? 1 : -1;
    level[v] = ntl;
    reason[v] = r;
    trail[trail_sz++] = l;
}

static int *propagate(void) {
    while (qhead < trail_sz) {
        int l = trail[qhead++];
        propagations++;
        int fl = -l;
        pvec *wl = &watches[lit_idx(fl)];
        int i = 0, j = 0;
        while (i < wl->sz) {
            int *c = wl->data[i++];
            int *ls = LITS(c);
            if (ls[0] == fl) { ls[0] = ls[1]; ls[1] = fl; }
            if (val(ls[0]) > 0) { wl->data[j++] = c; continue; }
            int moved = 0;
            for (int k = 2; k < c[0]; k++) {
                if (val(ls[k]) >= 0) {
                    ls[1] = ls[k]; ls[k] = fl;
                    pv_push(&watches[lit_idx(ls[1])], c);
                    moved = 1;
                    break;
                }
            }
            if (moved) continue;
            wl->data[j++] = c;
            if (val(ls[0]) < 0) {          /* conflict */
                while (i < wl->sz) wl->data[j++] = wl->data[i++];
                wl->sz = j;
                qhead = trail_sz;
                return c;
            }
            if (val(ls[0]) == 0) enqueue(ls[0], c);
        }
        wl->sz = j;
    }
    return NULL;
}

static void backtrack(int lvl) {
    while (ntl > lvl) {
        int mark = trail_lim[--ntl];
        while (trail_sz > mark) {
            int l = trail[--trail_sz];
            int v = abs(l);
            phase[v] = l > 0;
            assign[v] = 0;
            reason[v] = NULL;
            heap_insert(v);
        }
    }
    qhead = trail_sz;
}

/* first-UIP learning; returns learned size via *out_sz, backjump via *out_bj */
static int learned_buf_cap = 0;
static int *learned_buf = NULL;

static void analyze(int *confl, int *out_sz, int *out_bj, int *out_lbd) {
    int counter = 0, p = 0, idx = trail_sz - 1, lsz = 1;
    if (learned_buf_cap < nvars + 1) {
        learned_buf_cap = nvars + 1;
        learned_buf = (int *)realloc(learned_buf, learned_buf_cap * sizeof(int));
        if (!learned_buf) { fprintf(stderr, "c out of memory\n"); exit(1); }
    }
    int *c = confl;
    for (;;) {
        int *ls = LITS(c);
        for (int k = 0; k < c[0]; k++) {
            int q = ls[k], v = abs(q);
            if (q == p || seen[v] || level[v] == 0) continue;
            seen[v] = 1;
            bump(v);
            if (level[v] == ntl) counter++;
            else learned_buf[lsz++] = q;
        }
        while (!seen[abs(trail[idx])]) idx--;
        p = trail[idx];
        seen[abs(p)] = 0;
        counter--;
        if (counter == 0) break;
        c = reason[abs(p)];
        idx--;
    }
    learned_buf[0] = -p;
    int bj = 0;
    for (int k = 1; k < lsz; k++)
        if (level[abs(learned_buf[k])] > bj) bj = level[abs(learned_buf[k])];
    for (int k = 1; k < lsz; k++) {
        if (level[abs(learned_buf[k])] == bj) {
            int tmp = learned_buf[1]; learned_buf[1] = learned_buf[k]; learned_buf[k] = tmp;
            break;
        }
    }
    /* lbd = number of distinct decision levels among the learned literals */
    int lbd = 0;
    {
        static int *stamp = NULL; static int stamp_cap = 0; static int stamp_id = 0;
        if (stamp_cap < nvars + 2) {
            stamp_cap = nvars + 2;
            stamp = (int *)realloc(stamp, stamp_cap * sizeof(int));
            if (!stamp) { fprintf(stderr, "c out of memory\n"); exit(1); }
            memset(stamp, 0, stamp_cap * sizeof(int));
        }
        stamp_id++;
        for (int k = 0; k < lsz; k++) {
            int lv = level[abs(learned_buf[k])];
            if (stamp[lv] != stamp_id) { stamp[lv] = stamp_id; lbd++; }
        }
    }
    for (int k = 1; k < lsz; k++) seen[abs(learned_buf[k])] = 0;
    *out_sz = lsz; *out_bj = bj; *out_lbd = lbd;
}

static int cmp_learnt(const void *a, const void *b) {
    const int *ca = *(int *const *)a, *cb = *(int *const *)b;
    if (ca[1] != cb[1]) return cb[1] - ca[1];   /* higher lbd first (drop first) */
    return cb[0] - ca[0];                       /* then longer first */
}

static void reduce_db(void) {
    qsort(learnts.data, learnts.sz, sizeof(int *), cmp_learnt);
    int drop_until = learnts.sz / 2;   /* sorted worst-first */
    for (int i = 0; i < drop_until; i++) {
        int *c = learnts.data[i];
        if (c[1] > 2) c[0] = -c[0];    /* mark dead; glue clauses survive */
    }
    /* clauses serving as reasons must survive */
    for (int k = 0; k < trail_sz; k++) {
        int *r = reason[abs(trail[k])];
        if (r && r[0] < 0) r[0] = -r[0];
    }
    for (int li = 2; li < 2 * nvars + 2; li++) {
        pvec *wl = &watches[li];
        int j = 0;
        for (int i = 0; i < wl->sz; i++)
            if (wl->data[i][0] > 0) wl->data[j++] = wl->data[i];
        wl->sz = j;
    }
    int w = 0;
    for (int i = 0; i < learnts.sz; i++) {
        int *c = learnts.data[i];
        if (c[0] > 0) learnts.data[w++] = c;
        else free(c);
    }
    learnts.sz = w;
}

static int luby(int x) {
    int size = 1, seq = 0;
    while (size < x + 1) { seq++; size = 2 * size + 1; }
    while (size - 1 != x) { size = (size - 1) >> 1; seq--; x %= size; }
    return 1 << seq;
}

int main(int argc, char **argv) {
    if (argc < 2) { fprintf(stderr, "usage: %s FILE.cnf\n", argv[0]); return 1; }
    FILE *fp = fopen(argv[1], "r");
    if (!fp) { fprintf(stderr, "cannot open %s\n", argv[1]); return 1; }

    int nclauses_decl = 0;
    int c;
    /* skip comments, read header */
    for (;;) {
        c = fgetc(fp);
        if (c == 'c') { while (c != '\n' && c != EOF) c = fgetc(fp); }
        else if (c == 'p') {
            if (fscanf(fp, " cnf %d %d", &nvars, &nclauses_decl) != 2) {
                fprintf(stderr, "bad DIMACS header\n"); return 1;
            }
            break;
        } else if (c == EOF) { fprintf(stderr, "missing DIMACS header\n"); return 1; }
    }

    assign = (int *)calloc(nvars + 1, sizeof(int));
    level = (int *)calloc(nvars + 1, sizeof(int));
    reason = (int **)calloc(nvars + 1, sizeof(int *));
    trail = (int *)malloc((nvars + 1) * sizeof(int));
    trail_lim = (int *)malloc((nvars + 1) * sizeof(int));
    watches = (pvec *)calloc(2 * nvars + 2, sizeof(pvec));
    activity = (double *)calloc(nvars + 1, sizeof(double));
    phase = (char *)calloc(nvars + 1, 1);
    seen = (char *)calloc(nvars + 1, 1);
    heap = (int *)malloc((nvars + 1) * sizeof(int));
    heap_pos = (int *)malloc((nvars + 1) * sizeof(int));
    if (!assign || !level || !reason || !trail || !trail_lim || !watches ||
        !activity || !phase || !seen || !heap || !heap_pos) {
        fprintf(stderr, "c out of memory\n"); return 1;
    }
    for (int v = 0; v <= nvars; v++) heap_pos[v] = -1;
    for (int v = 1; v <= nvars; v++) heap_insert(v);

    /* read clauses; units enqueue immediately, conflicts at root are UNSAT */
    int *buf = (int *)malloc((nvars + 1) * sizeof(int));
    int bsz = 0, lit;
    int root_conflict = 0;
    while (fscanf(fp, "%d", &lit) == 1) {
        if (lit != 0) {
            if (abs(lit) > nvars) { fprintf(stderr, "literal out of range\n"); return 1; }
            /* drop duplicate literals; skip tautologies */
            int dup = 0, taut = 0;
            for (int k = 0; k < bsz; k++) {
                if (buf[k] == lit) dup = 1;
                if (buf[k] == -lit) taut = 1;
            }
            if (taut) { bsz = nvars + 2; } /* poison: flush clause as tautology */
            else if (!dup && bsz <= nvars) buf[bsz++] = lit;
            continue;
        }
        if (bsz == nvars + 2) { bsz = 0; continue; }  /* tautology dropped */
        if (bsz == 0) { root_conflict = 1; break; }   /* empty clause */
        if (bsz == 1) {
            if (val(buf[0]) < 0) { root_conflict = 1; break; }
            if (val(buf[0]) == 0) enqueue(buf[0], NULL);
        } else {
            watch_clause(alloc_clause(buf, bsz, 0));
        }
        bsz = 0;
    }
    fclose(fp);

    if (!root_conflict && propagate() != NULL) root_conflict = 1;
    if (root_conflict) { printf("s UNSATISFIABLE\n"); return 20; }

    long restart_at = 128 * luby(0);
    int restart_count = 0;
    long conflicts_here = 0;
    int max_learnts = 8000;

    for (;;) {
        int *confl = propagate();
        if (confl != NULL) {
            conflicts++;
            conflicts_here++;
            if (ntl == 0) { printf("s UNSATISFIABLE\n"); return 20; }
            int lsz, bj, lbd;
            analyze(confl, &lsz, &bj, &lbd);
            backtrack(bj);
            var_inc /= 0.95;
            if (lsz == 1) {
                enqueue(learned_buf[0], NULL);
            } else {
                int *lc = alloc_clause(learned_buf, lsz, lbd);
                watch_clause(lc);
                pv_push(&learnts, lc);
                enqueue(learned_buf[0], lc);
            }
            continue;
        }
        if (conflicts_here >= restart_at) {
            restart_count++;
            restart_at = 128 * luby(restart_count);
            conflicts_here = 0;
            backtrack(0);
            if (learnts.sz >= max_learnts) {
                reduce_db();
                max_learnts = max_learnts + max_learnts / 10;
            }
            continue;
        }
        int v = 0;
        while (heap_sz > 0) {
            int cand = heap_pop();
            if (assign[cand] == 0) { v = cand; break; }
        }
        if (v == 0) {
            printf("s SATISFIABLE\nv");
            for (int u = 1; u <= nvars; u++) {
                if (u > 1 && u % 10 == 1) printf("\nv");
                printf(" %d", assign[u] > 0 ? u : -u);
            }
            printf(" 0\n");
            fprintf(stderr, "c conflicts %ld decisions %ld propagations %ld\n",
                    conflicts, decisions, propagations);
            return 10;
        }
        decisions++;
        trail_lim[ntl++] = trail_sz;
        enqueue(phase[v] ? v : -v, NULL);
    }
}
