package main

import (
	"context"
	"os"

	"cloud.google.com/go/storage"
)

func Handler(ctx context.Context, meta []byte) error {
	client, err := storage.NewClient(ctx)
	if err != nil {
		return err
	}
	w := client.Bucket(os.Getenv("ASSET_BUCKET")).Object("meta/index.json").NewWriter(ctx)
	_, err = w.Write(meta)
	return err
}
