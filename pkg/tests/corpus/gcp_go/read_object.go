package main

import (
	"context"

	"cloud.google.com/go/storage"
)

func Handler(ctx context.Context) ([]byte, error) {
	client, err := storage.NewClient(ctx)
	if err != nil {
		return nil, err
	}
	r, err := client.Bucket("release-artifacts").Object("latest/manifest.yaml").NewReader(ctx)
	if err != nil {
		return nil, err
	}
	buf := make([]byte, 0)
	return buf, r.Close()
}
